// Copyright 2026 the coldsel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coldsel/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <vector>

namespace coldsel::io {

namespace {

constexpr char kMagic[8] = {'C', 'O', 'L', 'D', 'S', 'E', 'M', 'B'};
constexpr std::uint32_t kBinaryVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary embedding I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw ValidationError(std::string("binary embeddings: truncated ") + what);
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  auto split_on = [&](std::string_view sep) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(sep, start);
      out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + sep.size();
    }
  };
  if (line.find('\t') != std::string_view::npos) {
    split_on("\t");
  } else if (line.find(',') != std::string_view::npos) {
    split_on(",");
  } else if (line.find("::") != std::string_view::npos) {
    split_on("::");
  } else {
    std::size_t pos = 0;
    while (pos < line.size()) {
      const auto b = line.find_first_not_of(" \r", pos);
      if (b == std::string_view::npos) break;
      const auto e = line.find_first_of(" \r", b);
      out.push_back(line.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
      pos = e == std::string_view::npos ? line.size() : e;
    }
  }
  return out;
}

void require_id_token(const std::string& id) {
  require(!id.empty(), "embedding id must be non-empty");
  require(id.find_first_of(" \t\r\n") == std::string::npos,
          "embedding id '" + id + "' contains whitespace");
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw RuntimeError("format_real: conversion failed");
  return std::string(buf, end);
}

double parse_real(std::string_view text, const std::string& what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw ValidationError(what + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

void write_embeddings(std::ostream& out, const EmbeddingMatrix& matrix, EmbeddingFormat format) {
  if (format == EmbeddingFormat::Binary) {
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kBinaryVersion);
    put<std::uint64_t>(out, matrix.count());
    put<std::uint64_t>(out, matrix.dim());
    for (std::size_t i = 0; i < matrix.count(); ++i) {
      const auto& id = matrix.id(i);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
      out.write(id.data(), static_cast<std::streamsize>(id.size()));
      for (double v : matrix.row(i)) put<double>(out, v);
    }
    return;
  }
  out << matrix.count() << ' ' << matrix.dim() << '\n';
  for (std::size_t i = 0; i < matrix.count(); ++i) {
    require_id_token(matrix.id(i));
    out << matrix.id(i);
    for (double v : matrix.row(i)) out << ' ' << format_real(v);
    out << '\n';
  }
}

EmbeddingMatrix read_embeddings(std::istream& in) {
  char head[sizeof(kMagic)] = {};
  in.read(head, sizeof(head));
  const bool binary = in.gcount() == sizeof(head) && std::memcmp(head, kMagic, sizeof(kMagic)) == 0;
  if (binary) {
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kBinaryVersion) {
      throw ValidationError("binary embeddings: unsupported version " + std::to_string(version));
    }
    const auto n = get<std::uint64_t>(in, "row count");
    const auto dim = get<std::uint64_t>(in, "dimension");
    require(dim > 0, "binary embeddings: zero dimension");
    std::vector<double> values;
    std::vector<std::string> ids;
    values.reserve(n * dim);
    ids.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto len = get<std::uint32_t>(in, "id length");
      std::string id(len, '\0');
      if (!in.read(id.data(), len)) throw ValidationError("binary embeddings: truncated id");
      ids.push_back(std::move(id));
      for (std::uint64_t d = 0; d < dim; ++d) values.push_back(get<double>(in, "value"));
    }
    return EmbeddingMatrix(dim, std::move(values), std::move(ids));
  }

  in.clear();
  in.seekg(0);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw ValidationError("embeddings: empty file");
  std::size_t n = 0;
  std::size_t dim = 0;
  {
    std::istringstream hdr(line);
    if (!(hdr >> n >> dim) || dim == 0) {
      throw ValidationError("embeddings line " + std::to_string(line_no) + ": expected 'N D' header");
    }
  }
  std::vector<double> values;
  std::vector<std::string> ids;
  values.reserve(n * dim);
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line()) {
      throw ValidationError("embeddings: expected " + std::to_string(n) + " rows, found " +
                            std::to_string(i));
    }
    const auto fields = split_fields(line);
    const std::string where = "embeddings line " + std::to_string(line_no);
    if (fields.size() != dim + 1) {
      throw ValidationError(where + ": expected id and " + std::to_string(dim) + " values, got " +
                            std::to_string(fields.size()) + " fields");
    }
    ids.emplace_back(fields[0]);
    for (std::size_t d = 0; d < dim; ++d) values.push_back(parse_real(fields[d + 1], where));
  }
  return EmbeddingMatrix(dim, std::move(values), std::move(ids));
}

void save_embeddings(const std::string& path, const EmbeddingMatrix& matrix, EmbeddingFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot open '" + path + "' for writing");
  write_embeddings(out, matrix, format);
  if (!out) throw RuntimeError("write failed for '" + path + "'");
}

EmbeddingMatrix load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open '" + path + "'");
  return read_embeddings(in);
}

RatingsTable read_ratings(std::istream& in) {
  RatingsTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t data_rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    const std::string where = "ratings line " + std::to_string(line_no);
    if (fields.size() < 3 || fields.size() > 4) {
      throw ValidationError(where + ": expected user, item, rating[, timestamp]");
    }
    double value = 0.0;
    try {
      value = parse_real(fields[2], where);
    } catch (const ValidationError&) {
      // A non-numeric rating on the first line is a header.
      if (line_no == 1) continue;
      throw;
    }
    if (fields[0].empty() || fields[1].empty()) throw ValidationError(where + ": empty user or item id");
    if (!std::isfinite(value)) throw ValidationError(where + ": rating is not finite");
    table.add(fields[0], fields[1], value);
    ++data_rows;
  }
  if (data_rows == 0) throw ValidationError("ratings: no rating rows");
  return table;
}

RatingsTable load_ratings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open '" + path + "'");
  return read_ratings(in);
}

void write_ratings(std::ostream& out, const RatingsTable& ratings) {
  for (const auto& r : ratings.ratings()) {
    out << ratings.user_id(r.user) << '\t' << ratings.item_id(r.item) << '\t' << format_real(r.value)
        << '\n';
  }
}

void save_ratings(const std::string& path, const RatingsTable& ratings) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot open '" + path + "' for writing");
  write_ratings(out, ratings);
  if (!out) throw RuntimeError("write failed for '" + path + "'");
}

void write_selection(std::ostream& out, const SelectionResult& selection,
                     const EmbeddingMatrix& items) {
  out << "#method " << method_name(selection.method) << '\n';
  for (std::size_t r = 0; r < selection.ranked.size(); ++r) {
    out << r + 1 << '\t' << items.id(selection.ranked[r]) << '\t' << format_real(selection.scores[r])
        << '\n';
  }
}

SelectionResult read_selection(std::istream& in, const EmbeddingMatrix& items) {
  SelectionResult out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.starts_with("#method ")) {
      out.method = parse_method(trim(t.substr(8)));
      continue;
    }
    const auto fields = split_fields(t);
    const std::string where = "selection line " + std::to_string(line_no);
    if (fields.size() != 3) throw ValidationError(where + ": expected rank, id, score");
    const auto idx = items.find(fields[1]);
    if (idx < 0) throw ValidationError(where + ": unknown item id '" + std::string(fields[1]) + "'");
    out.ranked.push_back(static_cast<Index>(idx));
    out.scores.push_back(parse_real(fields[2], where));
  }
  require(!out.ranked.empty(), "selection file has no rows");
  return out;
}

void save_selection(const std::string& path, const SelectionResult& selection,
                    const EmbeddingMatrix& items) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot open '" + path + "' for writing");
  write_selection(out, selection, items);
  if (!out) throw RuntimeError("write failed for '" + path + "'");
}

SelectionResult load_selection(const std::string& path, const EmbeddingMatrix& items) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open '" + path + "'");
  return read_selection(in, items);
}

std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return digest_hex(bytes);
}

}  // namespace coldsel::io
