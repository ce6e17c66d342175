#include "alsvm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "alsvm/random.hpp"

namespace alsvm {

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
  FeatureId prev = 0;
  for (const auto& e : entries) {
    if (e.id == 0) throw std::invalid_argument("feature ids start at 1");
    if (e.id <= prev) throw std::invalid_argument("feature ids must be strictly increasing");
    prev = e.id;
  }
  std::erase_if(entries, [](const Entry& e) { return e.value == 0.0; });
  SparseVector v;
  v.entries_ = std::move(entries);
  return v;
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  std::vector<Entry> entries;
  entries.reserve(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) entries.push_back({static_cast<FeatureId>(i + 1), dense[i]});
  }
  SparseVector v;
  v.entries_ = std::move(entries);
  return v;
}

double SparseVector::squared_norm() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += e.value * e.value;
  return s;
}

bool SparseVector::all_finite() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return std::isfinite(e.value); });
}

double dot(const SparseVector& a, const SparseVector& b) noexcept {
  auto ea = a.entries();
  auto eb = b.entries();
  std::size_t i = 0, j = 0;
  double s = 0.0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].id == eb[j].id) {
      s += ea[i++].value * eb[j++].value;
    } else if (ea[i].id < eb[j].id) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double dot(std::span<const double> dense, const SparseVector& x) noexcept {
  double s = 0.0;
  for (const auto& e : x.entries()) {
    if (e.id < dense.size()) s += dense[e.id] * e.value;
  }
  return s;
}

Dataset::Dataset(std::vector<Row> rows) {
  examples_.reserve(rows.size());
  for (auto& row : rows) {
    if (row.label != Label::Positive && row.label != Label::Negative) {
      throw std::invalid_argument("label must be +1 or -1");
    }
    num_features_ = std::max(num_features_, row.features.max_id());
    if (row.label == Label::Positive) ++positives_;
    examples_.push_back({examples_.size(), row.label, std::move(row.features)});
  }
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> split_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

Dataset::Row parse_line(std::string_view line, std::size_t lineno) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  const auto tokens = split_tokens(line);
  if (tokens.empty()) throw ParseError(lineno, "missing label");

  Dataset::Row row{Label::Negative, {}};
  const auto label = tokens.front();
  if (label == "+1" || label == "1") {
    row.label = Label::Positive;
  } else if (label == "-1") {
    row.label = Label::Negative;
  } else {
    throw ParseError(lineno, "invalid label '" + std::string(label) + "'");
  }

  std::vector<SparseVector::Entry> entries;
  entries.reserve(tokens.size() - 1);
  FeatureId prev = 0;
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const auto tok = tokens[t];
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size()) {
      throw ParseError(lineno, "malformed feature '" + std::string(tok) + "'");
    }
    const auto id_str = tok.substr(0, colon);
    const auto val_str = tok.substr(colon + 1);

    FeatureId id = 0;
    auto [ip, iec] = std::from_chars(id_str.data(), id_str.data() + id_str.size(), id);
    if (iec != std::errc{} || ip != id_str.data() + id_str.size() || id == 0) {
      throw ParseError(lineno, "invalid feature id '" + std::string(id_str) + "'");
    }
    if (id <= prev) {
      throw ParseError(lineno, "feature ids not ascending at '" + std::string(tok) + "'");
    }
    prev = id;

    double value = 0.0;
    auto [vp, vec] = std::from_chars(val_str.data(), val_str.data() + val_str.size(), value);
    if (vec != std::errc{} || vp != val_str.data() + val_str.size() || !std::isfinite(value)) {
      throw ParseError(lineno, "invalid feature value '" + std::string(val_str) + "'");
    }
    entries.push_back({id, value});
  }
  row.features = SparseVector::from_entries(std::move(entries));
  return row;
}

}  // namespace

Dataset parse_sparse_text(std::istream& in) {
  std::vector<Dataset::Row> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.front() == '#') continue;
    if (std::all_of(line.begin(), line.end(), is_space)) continue;
    rows.push_back(parse_line(line, lineno));
  }
  if (rows.empty()) throw ParseError(lineno, "no examples in input");
  return Dataset(std::move(rows));
}

Dataset load_sparse_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_sparse_text(in);
}

void write_sparse_text(std::ostream& out, const Dataset& data) {
  char buf[64];
  for (const auto& ex : data.examples()) {
    out << (ex.label == Label::Positive ? "+1" : "-1");
    for (const auto& e : ex.features.entries()) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, e.value);
      out << ' ' << e.id << ':' << std::string_view(buf, p - buf);
    }
    out << '\n';
  }
}

void save_sparse_text(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_sparse_text(out, data);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<FoldSplit> kfold_split(const Dataset& data, std::size_t k, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (k < 2 || k > n) {
    throw std::invalid_argument("fold count must be in [2, " + std::to_string(n) + "]");
  }
  std::vector<ExampleId> order(n);
  std::iota(order.begin(), order.end(), ExampleId{0});
  Rng rng(derive_seed(seed, "kfold"));
  rng.shuffle(std::span<ExampleId>(order));

  std::vector<FoldSplit> folds(k);
  std::vector<std::size_t> fold_of(n);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) fold_of[order[pos++]] = f;
    folds[f].fold_index = f;
  }
  for (ExampleId id = 0; id < n; ++id) {
    for (std::size_t f = 0; f < k; ++f) {
      (fold_of[id] == f ? folds[f].test_ids : folds[f].pool_ids).push_back(id);
    }
  }
  return folds;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 10) throw std::invalid_argument("synthetic datasets need n >= 10");
  if (!(spec.positive_fraction > 0.0 && spec.positive_fraction < 1.0)) {
    throw std::invalid_argument("positive_fraction must lie in (0, 1)");
  }
  // The epsilon absorbs representation error such as 0.1 * 1000 = 99.999...
  const auto n_pos = static_cast<std::size_t>(
      std::floor(spec.positive_fraction * static_cast<double>(spec.n) + 1e-9));
  if (n_pos < 1 || n_pos >= spec.n) {
    throw std::invalid_argument("positive_fraction * n must leave at least one example per class");
  }
  if (spec.num_clusters < 1) throw std::invalid_argument("need at least one cluster per class");
  if (!(spec.overlap >= 0.0) || !std::isfinite(spec.overlap)) {
    throw std::invalid_argument("overlap must be a finite value >= 0");
  }
  if (spec.dimension < 2 || spec.dimension > 20) {
    throw std::invalid_argument("dimension must be in [2, 20]");
  }
  if (!(spec.duplicate_fraction >= 0.0 && spec.duplicate_fraction < 1.0)) {
    throw std::invalid_argument("duplicate_fraction must lie in [0, 1)");
  }

  const std::size_t d = spec.dimension;
  Rng rng(derive_seed(spec.seed, "synthetic"));

  std::vector<double> normal(d);
  double norm = 0.0;
  while (norm < 1e-3) {
    norm = 0.0;
    for (auto& v : normal) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
  }
  for (auto& v : normal) v /= norm;

  auto project_out = [&](std::vector<double>& v) {
    double p = 0.0;
    for (std::size_t i = 0; i < d; ++i) p += v[i] * normal[i];
    for (std::size_t i = 0; i < d; ++i) v[i] -= p * normal[i];
  };

  // A point is stored as (orthogonal part, signed distance along the normal).
  struct Point {
    std::vector<double> orth;
    double along;
  };

  // Both classes draw from the same orthogonal centres, so only the
  // component along the normal carries label information.
  std::vector<std::vector<double>> centers(spec.num_clusters, std::vector<double>(d));
  for (auto& c : centers) {
    for (auto& v : c) v = 3.0 * rng.normal();
    project_out(c);
  }

  auto make_class = [&](double y, std::size_t count) {
    struct Cluster {
      const std::vector<double>& center;
      double offset;
    };
    std::vector<Cluster> clusters;
    for (const auto& c : centers) clusters.push_back({c, rng.uniform(1.0, 3.0)});
    std::vector<Point> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!pts.empty() && rng.uniform01() < spec.duplicate_fraction) {
        Point dup = pts[rng.uniform_index(pts.size())];
        for (auto& v : dup.orth) v += 0.05 * rng.normal();
        project_out(dup.orth);
        pts.push_back(std::move(dup));
        continue;
      }
      const auto& c = clusters[rng.uniform_index(clusters.size())];
      Point p{c.center, 0.0};
      for (auto& v : p.orth) v += rng.normal();
      project_out(p.orth);
      const double dist = std::max(0.25, c.offset + 0.5 * rng.normal());
      p.along = y * dist + spec.overlap * rng.normal();
      pts.push_back(std::move(p));
    }
    return pts;
  };

  const auto positives = make_class(1.0, n_pos);
  const auto negatives = make_class(-1.0, spec.n - n_pos);

  std::vector<Dataset::Row> rows;
  rows.reserve(spec.n);
  std::vector<double> x(d);
  auto emit = [&](const Point& p, Label label) {
    for (std::size_t i = 0; i < d; ++i) x[i] = p.orth[i] + p.along * normal[i];
    rows.push_back({label, SparseVector::from_dense(x)});
  };
  for (const auto& p : positives) emit(p, Label::Positive);
  for (const auto& p : negatives) emit(p, Label::Negative);
  rng.shuffle(std::span<Dataset::Row>(rows));
  return Dataset(std::move(rows));
}

std::uint64_t fingerprint(const Dataset& data) {
  std::ostringstream os;
  write_sparse_text(os, data);
  return fnv1a64(os.str());
}

}  // namespace alsvm
