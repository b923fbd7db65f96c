#pragma once

// Dataset schema (JSON Lines), validation, 6:2:2 splitting and pretrained
// word-vector ingestion.
//
// One example per line:
//   {"id": str, "tokens": [str], "dep_heads": [int],
//    "groups": [{"action": [s,e], "location": [s,e]|null, "object": [s,e]|null}]}
// Spans are inclusive 0-based token indices; the root token is its own head.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "slfnet/encoders.hpp"
#include "slfnet/types.hpp"

namespace slfnet {

inline constexpr std::size_t kDefaultKMax = 3;

struct NLCExample {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::size_t> dep_heads;
  std::vector<SlfGroup> groups;
  friend bool operator==(const NLCExample&, const NLCExample&) = default;
};

// Throws DataError (tagged with `line` when non-zero) on: head/token count
// mismatch, head out of range, zero or several roots, spans out of bounds,
// overlapping gold actions, more than k_max groups.
void validate_example(const NLCExample& ex, std::size_t k_max = kDefaultKMax, std::size_t line = 0);

NLCExample parse_example(std::string_view json_line, std::size_t line = 0,
                         std::size_t k_max = kDefaultKMax);
// Canonical single-line serialization (keys in schema order, no whitespace).
std::string format_example(const NLCExample& ex);

std::vector<NLCExample> read_dataset(std::istream& in, std::size_t k_max = kDefaultKMax);
std::vector<NLCExample> load_dataset(const std::string& path, std::size_t k_max = kDefaultKMax);
void write_dataset(std::ostream& out, const std::vector<NLCExample>& examples);
void save_dataset(const std::string& path, const std::vector<NLCExample>& examples);

struct DatasetSplit {
  std::vector<NLCExample> train;
  std::vector<NLCExample> dev;
  std::vector<NLCExample> test;
};

// Sorts by id, shuffles with `seed`, then takes floor(n/5) for dev and for test;
// the remainder goes to train. Needs at least 5 examples.
DatasetSplit split_dataset(std::vector<NLCExample> examples, std::uint64_t seed);

// Every distinct token across the examples.
Vocabulary build_vocabulary(const std::vector<NLCExample>& examples);

struct PretrainedReport {
  std::size_t dim = 0;
  std::size_t found = 0;
  std::vector<std::string> missing;  // vocabulary tokens initialized randomly
};

// Reads "token v1 ... vd" lines. Tokens in the file get their file vectors, the
// rest uniform [-0.1, 0.1] draws from `seed`; the unknown row is zero.
// Throws DataError naming the line on inconsistent dimensions or bad numbers,
// and when expected_dim is non-zero and differs from the file.
EmbeddingTable load_pretrained_embeddings(const std::string& path, const Vocabulary& vocab,
                                          std::uint64_t seed, std::size_t expected_dim = 0,
                                          PretrainedReport* report = nullptr);
EmbeddingTable read_pretrained_embeddings(std::istream& in, const Vocabulary& vocab,
                                          std::uint64_t seed, std::size_t expected_dim = 0,
                                          PretrainedReport* report = nullptr);

}  // namespace slfnet
