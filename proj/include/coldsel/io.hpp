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

#pragma once

// File formats.
//
// Embeddings, text:   line 1 "N D", then N lines "<id> v1 ... vD" with
//                     shortest round-trip decimal reals.
// Embeddings, binary: "COLDSEMB", u32 version (1), u64 N, u64 D, then per row
//                     u32 id length, id bytes, D little-endian float64.
// Ratings:            "user,item,rating[,timestamp]" separated by tab, comma,
//                     "::" or whitespace; an optional header line.
// Selections:         "rank<TAB>id<TAB>score" with a "#method <name>" header.

#include <iosfwd>
#include <string>

#include "coldsel/core.hpp"
#include "coldsel/ratings.hpp"

namespace coldsel::io {

enum class EmbeddingFormat { Text, Binary };

void write_embeddings(std::ostream& out, const EmbeddingMatrix& matrix, EmbeddingFormat format);
/// Detects the format from the leading bytes.
EmbeddingMatrix read_embeddings(std::istream& in);

void save_embeddings(const std::string& path, const EmbeddingMatrix& matrix,
                     EmbeddingFormat format = EmbeddingFormat::Text);
EmbeddingMatrix load_embeddings(const std::string& path);

RatingsTable read_ratings(std::istream& in);
RatingsTable load_ratings(const std::string& path);
void write_ratings(std::ostream& out, const RatingsTable& ratings);
void save_ratings(const std::string& path, const RatingsTable& ratings);

void write_selection(std::ostream& out, const SelectionResult& selection,
                     const EmbeddingMatrix& items);
/// Resolves ids against `items`.
SelectionResult read_selection(std::istream& in, const EmbeddingMatrix& items);
void save_selection(const std::string& path, const SelectionResult& selection,
                    const EmbeddingMatrix& items);
SelectionResult load_selection(const std::string& path, const EmbeddingMatrix& items);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_real(double value);
/// Strict full-string parse; throws ValidationError naming `what`.
double parse_real(std::string_view text, const std::string& what);

/// FNV-1a 64-bit digest, hex encoded.
std::string digest_hex(std::string_view bytes);
std::string file_digest(const std::string& path);

}  // namespace coldsel::io
