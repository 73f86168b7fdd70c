#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kmcl/graphon.hpp"

namespace kmcl {

enum class GraphKind { kDeterministicDense, kRandomDense, kRandomSparse };

std::string to_string(GraphKind kind);

// The three graph constructions of the simulation studies: complete simple
// (deterministic dense), random undirected dense (edge probability p) and
// random undirected sparse (edge probability n^-gamma p).
enum class GraphCase { kComplete, kRandomDense, kRandomSparse };

std::string to_string(GraphCase c);
GraphCase graph_case_from_string(const std::string& s);

struct GraphRecipe {
  GraphCase kind = GraphCase::kComplete;
  std::size_t n = 2;
  double p = 1.0;        // complete allows p < 1 (deterministic uniform)
  double gamma = 0.3;    // used only for random_sparse
  std::uint64_t seed = 0;
};

// n x n nonnegative coupling weights together with the scaling factor
// alpha_n and construction provenance. Deterministic uniform matrices are
// held as a constant token and expanded on demand; random sparse samples
// use compressed sparse rows with implicit unit weights.
class WeightMatrix {
 public:
  struct UniformStorage {
    double value;
  };
  struct DenseStorage {
    std::vector<double> w;  // row-major n x n
  };
  struct CsrStorage {
    std::vector<std::uint64_t> row_ptr;  // size n + 1
    std::vector<std::uint32_t> cols;     // weights are implicitly 1
  };
  using Storage = std::variant<UniformStorage, DenseStorage, CsrStorage>;

  WeightMatrix(std::size_t n, Storage storage, double alpha_n, GraphKind kind,
               bool symmetric, std::uint64_t seed,
               std::optional<double> gamma = std::nullopt);

  std::size_t n() const { return n_; }
  double alpha_n() const { return alpha_n_; }
  GraphKind kind() const { return kind_; }
  bool symmetric() const { return symmetric_; }
  std::uint64_t seed() const { return seed_; }
  std::optional<double> gamma() const { return gamma_; }

  const Storage& storage() const { return storage_; }
  bool is_uniform() const;
  double uniform_value() const;

  double at(std::size_t i, std::size_t j) const;

  // Neighbor column indices of row i (CSR storage only).
  std::span<const std::uint32_t> row(std::size_t i) const;

  // Stored nonzero count; for symmetric matrices sampled over the upper
  // triangle this counts pairs i <= j once (loops included), so that
  // edge_count / (n(n+1)/2) is the per-pair Bernoulli rate.
  std::uint64_t edge_count() const;

  // One "i j w" line per nonzero, 1-based, sorted by (i, j).
  void write_coordinate_list(std::ostream& os) const;
  // {n, kind, alpha_n, edge_count, seed} as a JSON record.
  std::string density_summary_json() const;

 private:
  std::size_t n_;
  Storage storage_;
  double alpha_n_;
  GraphKind kind_;
  bool symmetric_;
  std::uint64_t seed_;
  std::optional<double> gamma_;
};

// w_ij = <W>^n_ij for every pair; alpha_n = 1. Uniform kernels produce the
// constant-token fast path.
WeightMatrix build_deterministic_dense(const Graphon& w, std::size_t n,
                                       std::size_t subcells = 4);

// Bernoulli sample with P(w_ij = 1) = <W>^n_ij; requires range(W) in [0,1].
// Undirected mode (default) samples pairs i <= j and mirrors; directed mode
// samples all ordered pairs independently. Randomness is a pure function of
// (seed, i, j).
WeightMatrix sample_random_dense(const Graphon& w, std::size_t n,
                                 std::uint64_t seed, bool directed = false,
                                 std::size_t subcells = 4);

// Sparse sample: alpha_n = n^-gamma, gamma in (0, 1/2), and
// P(w_ij = 1) = alpha_n * <min(alpha_n^-1, W)>^n_ij, stored as CSR.
WeightMatrix sample_random_sparse(const Graphon& w, std::size_t n,
                                  double gamma, std::uint64_t seed,
                                  bool directed = false,
                                  std::size_t subcells = 4);

// Uniform-kernel construction from a recipe (the dispatch used by the
// experiment runners).
WeightMatrix build_graph(const GraphRecipe& recipe);

}  // namespace kmcl
