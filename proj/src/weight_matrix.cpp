#include "kmcl/weight_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "kmcl/rng.hpp"

namespace kmcl {

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kDeterministicDense:
      return "deterministic_dense";
    case GraphKind::kRandomDense:
      return "random_dense";
    case GraphKind::kRandomSparse:
      return "random_sparse";
  }
  return "unknown";
}

std::string to_string(GraphCase c) {
  switch (c) {
    case GraphCase::kComplete:
      return "complete";
    case GraphCase::kRandomDense:
      return "random_dense";
    case GraphCase::kRandomSparse:
      return "random_sparse";
  }
  return "unknown";
}

GraphCase graph_case_from_string(const std::string& s) {
  if (s == "complete") return GraphCase::kComplete;
  if (s == "random_dense") return GraphCase::kRandomDense;
  if (s == "random_sparse") return GraphCase::kRandomSparse;
  throw std::invalid_argument("unknown graph case: " + s);
}

WeightMatrix::WeightMatrix(std::size_t n, Storage storage, double alpha_n,
                           GraphKind kind, bool symmetric, std::uint64_t seed,
                           std::optional<double> gamma)
    : n_(n),
      storage_(std::move(storage)),
      alpha_n_(alpha_n),
      kind_(kind),
      symmetric_(symmetric),
      seed_(seed),
      gamma_(gamma) {
  if (n_ < 1) throw std::invalid_argument("WeightMatrix: n must be >= 1");
  if (!(alpha_n_ > 0.0) || alpha_n_ > 1.0) {
    throw std::invalid_argument("WeightMatrix: alpha_n must lie in (0, 1]");
  }
}

bool WeightMatrix::is_uniform() const {
  return std::holds_alternative<UniformStorage>(storage_);
}

double WeightMatrix::uniform_value() const {
  return std::get<UniformStorage>(storage_).value;
}

double WeightMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("WeightMatrix::at");
  if (const auto* u = std::get_if<UniformStorage>(&storage_)) return u->value;
  if (const auto* d = std::get_if<DenseStorage>(&storage_)) {
    return d->w[i * n_ + j];
  }
  const auto& c = std::get<CsrStorage>(storage_);
  const auto lo = c.cols.begin() + static_cast<std::ptrdiff_t>(c.row_ptr[i]);
  const auto hi =
      c.cols.begin() + static_cast<std::ptrdiff_t>(c.row_ptr[i + 1]);
  return std::binary_search(lo, hi, static_cast<std::uint32_t>(j)) ? 1.0 : 0.0;
}

std::span<const std::uint32_t> WeightMatrix::row(std::size_t i) const {
  const auto& c = std::get<CsrStorage>(storage_);
  return {c.cols.data() + c.row_ptr[i], c.cols.data() + c.row_ptr[i + 1]};
}

std::uint64_t WeightMatrix::edge_count() const {
  std::uint64_t count = 0;
  if (const auto* u = std::get_if<UniformStorage>(&storage_)) {
    if (u->value == 0.0) return 0;
    const auto n = static_cast<std::uint64_t>(n_);
    return symmetric_ ? n * (n + 1) / 2 : n * n;
  }
  if (const auto* d = std::get_if<DenseStorage>(&storage_)) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = symmetric_ ? i : 0; j < n_; ++j) {
        if (d->w[i * n_ + j] != 0.0) ++count;
      }
    }
    return count;
  }
  const auto& c = std::get<CsrStorage>(storage_);
  if (!symmetric_) return c.cols.size();
  for (std::size_t i = 0; i < n_; ++i) {
    for (auto j : row(i)) {
      if (j >= i) ++count;
    }
  }
  return count;
}

void WeightMatrix::write_coordinate_list(std::ostream& os) const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (std::holds_alternative<CsrStorage>(storage_)) {
      for (auto j : row(i)) {
        os << i + 1 << ' ' << j + 1 << ' ' << 1 << '\n';
      }
    } else {
      for (std::size_t j = 0; j < n_; ++j) {
        const double w = at(i, j);
        if (w != 0.0) os << i + 1 << ' ' << j + 1 << ' ' << w << '\n';
      }
    }
  }
}

std::string WeightMatrix::density_summary_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"n\": " << n_ << ", \"kind\": \"" << to_string(kind_)
     << "\", \"alpha_n\": " << alpha_n_ << ", \"edge_count\": " << edge_count()
     << ", \"seed\": " << seed_ << "}";
  return os.str();
}

WeightMatrix build_deterministic_dense(const Graphon& w, std::size_t n,
                                       std::size_t subcells) {
  if (n < 2) throw std::invalid_argument("build_deterministic_dense: n >= 2");
  if (w.is_uniform()) {
    return WeightMatrix(n, WeightMatrix::UniformStorage{w.uniform_value()},
                        1.0, GraphKind::kDeterministicDense,
                        /*symmetric=*/true, /*seed=*/0);
  }
  std::vector<double> vals(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      vals[i * n + j] = graphon_average(w, n, i, j, subcells);
    }
  }
  // Quadrature of a symmetric kernel can differ across the diagonal by
  // rounding only; snap those to the upper-triangle value so the symmetric
  // flag is an exact statement.
  bool symmetric = true;
  for (std::size_t i = 0; i < n && symmetric; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale =
          std::max({1.0, std::abs(vals[i * n + j]), std::abs(vals[j * n + i])});
      if (std::abs(vals[i * n + j] - vals[j * n + i]) > 1e-12 * scale) {
        symmetric = false;
        break;
      }
    }
  }
  if (symmetric) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        vals[j * n + i] = vals[i * n + j];
      }
    }
  }
  return WeightMatrix(n, WeightMatrix::DenseStorage{std::move(vals)}, 1.0,
                      GraphKind::kDeterministicDense, symmetric, /*seed=*/0);
}

namespace {

double pair_probability(const Graphon& w, std::size_t n, std::size_t i,
                        std::size_t j, std::size_t subcells) {
  const double p = graphon_average(w, n, i, j, subcells);
  if (p < 0.0 || p > 1.0) {
    throw std::domain_error(
        "random graph sampling: graphon cell average outside [0, 1]");
  }
  return p;
}

bool pair_hit(std::uint64_t seed, std::size_t i, std::size_t j, double prob) {
  return stream(seed, i, j).next_unit() < prob;
}

}  // namespace

WeightMatrix sample_random_dense(const Graphon& w, std::size_t n,
                                 std::uint64_t seed, bool directed,
                                 std::size_t subcells) {
  if (n < 2) throw std::invalid_argument("sample_random_dense: n >= 2");
  std::vector<double> vals(n * n, 0.0);
  const bool uniform = w.is_uniform();
  const double up = uniform ? w.uniform_value() : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = directed ? 0 : i;
    for (std::size_t j = j0; j < n; ++j) {
      const double prob =
          uniform ? up : pair_probability(w, n, i, j, subcells);
      if (pair_hit(seed, i, j, prob)) {
        vals[i * n + j] = 1.0;
        if (!directed) vals[j * n + i] = 1.0;
      }
    }
  }
  return WeightMatrix(n, WeightMatrix::DenseStorage{std::move(vals)}, 1.0,
                      GraphKind::kRandomDense, !directed, seed);
}

WeightMatrix sample_random_sparse(const Graphon& w, std::size_t n,
                                  double gamma, std::uint64_t seed,
                                  bool directed, std::size_t subcells) {
  if (n < 2) throw std::invalid_argument("sample_random_sparse: n >= 2");
  if (!(gamma > 0.0) || !(gamma < 0.5)) {
    throw std::domain_error("sample_random_sparse: gamma must be in (0, 1/2)");
  }
  const double alpha = std::pow(static_cast<double>(n), -gamma);
  const double cap = 1.0 / alpha;
  const bool uniform = w.is_uniform();
  // Truncated kernel min(alpha^-1, W); for kernels bounded by 1 the
  // truncation is inactive since alpha^-1 > 1.
  const double up = uniform ? alpha * std::min(cap, w.uniform_value()) : 0.0;

  std::vector<std::vector<std::uint32_t>> rows(n);
  const Graphon truncated =
      uniform ? w
              : Graphon::callable(
                    [&w, cap](double x, double y) {
                      return std::min(cap, w(x, y));
                    },
                    "truncated " + w.description(), w.symmetric_hint());
  auto prob_of = [&](std::size_t i, std::size_t j) {
    if (uniform) return up;
    return alpha * graphon_average(truncated, n, i, j, subcells);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = directed ? 0 : i;
    for (std::size_t j = j0; j < n; ++j) {
      const double prob = prob_of(i, j);
      if (prob < 0.0 || prob > 1.0) {
        throw std::domain_error("sample_random_sparse: probability outside "
                                "[0, 1]");
      }
      if (pair_hit(seed, i, j, prob)) {
        rows[i].push_back(static_cast<std::uint32_t>(j));
        if (!directed && j != i) {
          rows[j].push_back(static_cast<std::uint32_t>(i));
        }
      }
    }
  }
  WeightMatrix::CsrStorage csr;
  csr.row_ptr.resize(n + 1, 0);
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < n; ++i) nnz += rows[i].size();
  csr.cols.reserve(nnz);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    csr.cols.insert(csr.cols.end(), rows[i].begin(), rows[i].end());
    csr.row_ptr[i + 1] = csr.cols.size();
  }
  return WeightMatrix(n, std::move(csr), alpha, GraphKind::kRandomSparse,
                      !directed, seed, gamma);
}

WeightMatrix build_graph(const GraphRecipe& recipe) {
  const auto kernel = Graphon::uniform(recipe.p);
  switch (recipe.kind) {
    case GraphCase::kComplete:
      return build_deterministic_dense(kernel, recipe.n);
    case GraphCase::kRandomDense:
      return sample_random_dense(kernel, recipe.n, recipe.seed);
    case GraphCase::kRandomSparse:
      return sample_random_sparse(kernel, recipe.n, recipe.gamma, recipe.seed);
  }
  throw std::logic_error("build_graph: unreachable");
}

}  // namespace kmcl
