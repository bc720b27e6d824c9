#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace swing {

enum class RegressorKind { SpotOnly, SpotAndIndex, SpotIndexPartial };

std::string to_string(RegressorKind k);
RegressorKind regressor_kind_from_string(const std::string& s);

// Logical regressor dimensions: 0 = gas spot, 1 = index, 2 = partial index.
// cells and degree are indexed by logical dimension; dimensions not used by
// the kind are ignored.
struct RegressorSpec {
  RegressorKind kind = RegressorKind::SpotOnly;
  std::vector<int> cells{6, 4, 1};
  std::vector<int> degree{1, 1, 1};

  void validate() const;
};

// Equal-count partition of the regressor samples, built dimension by
// dimension (each stratum of dimension d is split on the quantiles of its
// own samples in dimension d + 1), with a centred affine basis per leaf.
// Everything that depends only on the regressor samples is cached so that a
// fit against a new regressand costs one pass over the samples.
class LocalBasis {
 public:
  // xs is samples x dims; cells and degree are per column.
  LocalBasis(const Eigen::MatrixXd& xs, const std::vector<int>& cells, const std::vector<int>& degree);

  int dims() const { return dims_; }
  int leaves() const { return static_cast<int>(leaf_.size()); }
  std::size_t samples() const { return sample_leaf_.size(); }
  int coefficient_count() const { return coef_offset_.back(); }
  int leaf_of(const double* x) const;
  int sample_leaf(std::size_t i) const { return sample_leaf_[i]; }
  int leaf_size(int leaf) const { return leaf_[static_cast<std::size_t>(leaf)].count; }
  int leaf_basis_size(int leaf) const { return leaf_[static_cast<std::size_t>(leaf)].basis; }

  // Least-squares coefficients for ys (one per sample); stride lets the
  // caller pass a strided view.
  std::vector<double> fit(const double* ys, std::size_t stride = 1) const;
  void fit_into(const double* ys, std::size_t stride, double* coef) const;
  // Same, with ys[i] * weight[i].
  void fit_weighted_into(const double* ys, const double* weight, double* coef) const;

  double evaluate(const double* coef, const double* x) const;
  double evaluate_sample(const double* coef, std::size_t i) const;

  // Interior edges of the first dimension.
  std::vector<double> root_edges() const { return node_.front().edges; }

  void save(std::ostream& out) const;
  static std::shared_ptr<LocalBasis> load(std::istream& in);

 private:
  LocalBasis() = default;

  struct Node {
    int dim = 0;
    std::vector<double> edges;   // ascending interior edges
    std::vector<int> children;   // node ids, or ~leaf for leaves
  };
  struct Leaf {
    int count = 0;
    int basis = 1;
    std::vector<int> active;      // dims with an affine term
    std::vector<double> centre;   // per active dim
    std::vector<double> scale;    // per active dim
    Eigen::MatrixXd inverse;      // (Phi^T Phi)^{-1}
  };

  int build(const Eigen::MatrixXd& xs, std::vector<int>& members, int dim, const std::vector<int>& cells);
  void make_leaf(const Eigen::MatrixXd& xs, const std::vector<int>& members, const std::vector<int>& degree,
                 Leaf& leaf);
  void basis_row(const Leaf& leaf, const double* x, double* phi) const;

  int dims_ = 0;
  int min_count_ = 1;
  std::vector<Node> node_;
  std::vector<Leaf> leaf_;
  std::vector<int> coef_offset_;
  std::vector<int> sample_leaf_;
  std::vector<double> sample_phi_;  // samples x max basis
  int max_basis_ = 1;
};

// A fitted conditional expectation.
struct ConditionalEstimator {
  std::shared_ptr<const LocalBasis> basis;
  std::vector<double> coef;

  double evaluate(const double* x) const { return basis->evaluate(coef.data(), x); }
  double evaluate(const Eigen::VectorXd& x) const { return evaluate(x.data()); }
};

// Convenience one-shot fit: columns of xs are the regressors.
ConditionalEstimator fit(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                         const std::vector<int>& cells, const std::vector<int>& degree);

}  // namespace swing
