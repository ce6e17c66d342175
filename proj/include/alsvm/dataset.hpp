#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace alsvm {

using FeatureId = std::uint32_t;
using ExampleId = std::size_t;

enum class Label : std::int8_t { Negative = -1, Positive = 1 };

constexpr double sign(Label y) noexcept { return y == Label::Positive ? 1.0 : -1.0; }

/// Raised by the sparse text reader; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SparseVector {
 public:
  struct Entry {
    FeatureId id;
    double value;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SparseVector() = default;

  /// Ids must be >= 1 and strictly increasing; zero values are dropped.
  /// Throws std::invalid_argument otherwise.
  static SparseVector from_entries(std::vector<Entry> entries);

  /// Dense coordinates become ids 1..n.
  static SparseVector from_dense(std::span<const double> dense);

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  FeatureId max_id() const noexcept { return entries_.empty() ? 0 : entries_.back().id; }
  double squared_norm() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Entry> entries_;
};

double dot(const SparseVector& a, const SparseVector& b) noexcept;

/// `dense` is indexed by feature id; ids past its end contribute nothing.
double dot(std::span<const double> dense, const SparseVector& x) noexcept;

struct Example {
  ExampleId id = 0;
  Label label = Label::Negative;
  SparseVector features;
  friend bool operator==(const Example&, const Example&) = default;
};

/// Immutable labeled population. Example ids are 0..size()-1 in order.
class Dataset {
 public:
  struct Row {
    Label label;
    SparseVector features;
  };

  Dataset() = default;
  explicit Dataset(std::vector<Row> rows);

  std::span<const Example> examples() const noexcept { return examples_; }
  const Example& operator[](ExampleId id) const { return examples_.at(id); }
  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }
  FeatureId num_features() const noexcept { return num_features_; }
  std::size_t positive_count() const noexcept { return positives_; }
  std::size_t negative_count() const noexcept { return examples_.size() - positives_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Example> examples_;
  FeatureId num_features_ = 0;
  std::size_t positives_ = 0;
};

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<ExampleId> test_ids;  // sorted
  std::vector<ExampleId> pool_ids;  // sorted
};

// Sparse text format, one example per line:
//   LABEL (SP ID ":" VALUE)* (SP? "#" COMMENT)?
// LABEL is +1, 1 or -1; ids are >= 1 and strictly increasing. Blank lines and
// lines starting with '#' are skipped.
Dataset parse_sparse_text(std::istream& in);
Dataset load_sparse_text(const std::filesystem::path& path);

/// Values use the shortest round-trip representation, so reloading is exact.
void write_sparse_text(std::ostream& out, const Dataset& data);
void save_sparse_text(const std::filesystem::path& path, const Dataset& data);

/// Seeded k-fold partition. Test sizes differ by at most one.
std::vector<FoldSplit> kfold_split(const Dataset& data, std::size_t k, std::uint64_t seed);

struct SyntheticSpec {
  std::size_t n = 1000;
  double positive_fraction = 0.1;
  std::size_t num_clusters = 4;  // shared by both classes; each class has its own offsets
  double overlap = 0.0;          // std-dev of label-side noise; 0 keeps classes separable
  std::size_t dimension = 10;    // 2..20
  double duplicate_fraction = 0.3;
  std::uint64_t seed = 0;
};

/// Gaussian clusters on either side of a random hyperplane, with a share of
/// near-duplicate members. Exactly floor(positive_fraction * n) positives.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// 64-bit FNV-1a over the canonical text serialization.
std::uint64_t fingerprint(const Dataset& data);

}  // namespace alsvm
