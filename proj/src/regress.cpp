#include "swing/regress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "swing/binary_io.hpp"

namespace swing {

std::string to_string(RegressorKind k) {
  switch (k) {
    case RegressorKind::SpotOnly: return "spot";
    case RegressorKind::SpotAndIndex: return "spot_index";
    case RegressorKind::SpotIndexPartial: return "spot_index_partial";
  }
  return "?";
}

RegressorKind regressor_kind_from_string(const std::string& s) {
  if (s == "spot") return RegressorKind::SpotOnly;
  if (s == "spot_index") return RegressorKind::SpotAndIndex;
  if (s == "spot_index_partial") return RegressorKind::SpotIndexPartial;
  throw std::invalid_argument("unknown regressor kind '" + s +
                              "' (expected spot, spot_index or spot_index_partial)");
}

void RegressorSpec::validate() const {
  if (cells.size() != 3 || degree.size() != 3) {
    throw std::invalid_argument("regressor: cells and degree need one entry per dimension (3)");
  }
  for (int c : cells) {
    if (c < 1) throw std::invalid_argument("regressor: cells entries must be >= 1");
  }
  for (int d : degree) {
    if (d != 0 && d != 1) throw std::invalid_argument("regressor: degree entries must be 0 or 1");
  }
}

LocalBasis::LocalBasis(const Eigen::MatrixXd& xs, const std::vector<int>& cells,
                       const std::vector<int>& degree) {
  dims_ = static_cast<int>(xs.cols());
  if (dims_ < 1 || cells.size() != static_cast<std::size_t>(dims_) ||
      degree.size() != static_cast<std::size_t>(dims_)) {
    throw std::invalid_argument("regression: cells and degree must match the regressor dimension");
  }
  min_count_ = dims_ + 1;
  long total = 1;
  for (int c : cells) total *= c;
  if (xs.rows() < total * min_count_) {
    throw std::invalid_argument("regression: " + std::to_string(xs.rows()) + " samples cannot fill " +
                                std::to_string(total) + " cells of at least " +
                                std::to_string(min_count_) + " samples");
  }
  std::vector<int> members(static_cast<std::size_t>(xs.rows()));
  std::iota(members.begin(), members.end(), 0);
  sample_leaf_.assign(members.size(), -1);
  build(xs, members, 0, cells);

  coef_offset_.assign(1, 0);
  max_basis_ = 1 + dims_;
  sample_phi_.assign(members.size() * static_cast<std::size_t>(max_basis_), 0.0);

  std::vector<std::vector<int>> by_leaf(leaf_.size());
  for (std::size_t i = 0; i < sample_leaf_.size(); ++i) {
    by_leaf[static_cast<std::size_t>(sample_leaf_[i])].push_back(static_cast<int>(i));
  }
  for (std::size_t l = 0; l < leaf_.size(); ++l) {
    make_leaf(xs, by_leaf[l], degree, leaf_[l]);
    coef_offset_.push_back(coef_offset_.back() + leaf_[l].basis);
    for (int i : by_leaf[l]) {
      const Eigen::VectorXd x = xs.row(i).transpose();
      basis_row(leaf_[l], x.data(), &sample_phi_[static_cast<std::size_t>(i) * static_cast<std::size_t>(max_basis_)]);
    }
  }
}

int LocalBasis::build(const Eigen::MatrixXd& xs, std::vector<int>& members, int dim,
                      const std::vector<int>& cells) {
  if (dim == dims_) {
    const int id = static_cast<int>(leaf_.size());
    leaf_.emplace_back();
    leaf_.back().count = static_cast<int>(members.size());
    for (int i : members) sample_leaf_[static_cast<std::size_t>(i)] = id;
    return ~id;
  }
  const int node_id = static_cast<int>(node_.size());
  node_.emplace_back();
  node_[static_cast<std::size_t>(node_id)].dim = dim;

  std::vector<double> v(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) v[i] = xs(members[i], dim);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const auto k = static_cast<std::size_t>(cells[static_cast<std::size_t>(dim)]);
  std::vector<double> edges;
  for (std::size_t c = 1; c < k; ++c) {
    const double e = v[c * n / k];
    if (e > v.front() && (edges.empty() || e > edges.back())) edges.push_back(e);
  }

  auto stratum = [&](double x) {
    return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
  };
  // Merge strata too small to carry an affine fit into a neighbour.
  for (;;) {
    std::vector<int> count(edges.size() + 1, 0);
    for (double x : v) ++count[stratum(x)];
    std::size_t bad = count.size();
    for (std::size_t s = 0; s < count.size(); ++s) {
      if (count[s] < min_count_) {
        bad = s;
        break;
      }
    }
    if (bad == count.size() || edges.empty()) break;
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(bad == edges.size() ? bad - 1 : bad));
  }

  std::vector<std::vector<int>> split(edges.size() + 1);
  for (int i : members) split[stratum(xs(i, dim))].push_back(i);
  node_[static_cast<std::size_t>(node_id)].edges = edges;
  std::vector<int> children;
  for (auto& part : split) children.push_back(build(xs, part, dim + 1, cells));
  node_[static_cast<std::size_t>(node_id)].children = std::move(children);
  return node_id;
}

void LocalBasis::make_leaf(const Eigen::MatrixXd& xs, const std::vector<int>& members,
                           const std::vector<int>& degree, Leaf& leaf) {
  const auto n = static_cast<Eigen::Index>(members.size());
  leaf.active.clear();
  leaf.centre.clear();
  leaf.scale.clear();
  for (int d = 0; d < dims_; ++d) {
    if (degree[static_cast<std::size_t>(d)] == 0) continue;
    double mean = 0.0;
    for (int i : members) mean += xs(i, d);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (int i : members) var += (xs(i, d) - mean) * (xs(i, d) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (!(sd > 1e-12 * (1.0 + std::abs(mean)))) continue;
    leaf.active.push_back(d);
    leaf.centre.push_back(mean);
    leaf.scale.push_back(sd);
  }
  leaf.basis = 1 + static_cast<int>(leaf.active.size());

  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  auto design = [&]() {
    RowMatrix phi(n, leaf.basis);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::VectorXd x = xs.row(members[static_cast<std::size_t>(r)]).transpose();
      basis_row(leaf, x.data(), phi.row(r).data());
    }
    return phi;
  };
  RowMatrix phi = design();
  if (leaf.basis > 1) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
    qr.setThreshold(1e-10);
    if (qr.rank() < leaf.basis) {
      leaf.active.clear();
      leaf.centre.clear();
      leaf.scale.clear();
      leaf.basis = 1;
      phi = design();
    }
  }
  const Eigen::MatrixXd normal = phi.transpose() * phi;
  leaf.inverse = normal.ldlt().solve(Eigen::MatrixXd::Identity(leaf.basis, leaf.basis));
}

void LocalBasis::basis_row(const Leaf& leaf, const double* x, double* phi) const {
  phi[0] = 1.0;
  for (std::size_t a = 0; a < leaf.active.size(); ++a) {
    phi[a + 1] = (x[leaf.active[a]] - leaf.centre[a]) / leaf.scale[a];
  }
}

int LocalBasis::leaf_of(const double* x) const {
  int id = 0;
  for (;;) {
    const Node& node = node_[static_cast<std::size_t>(id)];
    const auto s = std::upper_bound(node.edges.begin(), node.edges.end(), x[node.dim]) - node.edges.begin();
    const int next = node.children[static_cast<std::size_t>(s)];
    if (next < 0) return ~next;
    id = next;
  }
}

std::vector<double> LocalBasis::fit(const double* ys, std::size_t stride) const {
  std::vector<double> coef(static_cast<std::size_t>(coefficient_count()));
  fit_into(ys, stride, coef.data());
  return coef;
}

void LocalBasis::fit_into(const double* ys, std::size_t stride, double* coef) const {
  std::vector<double> b(static_cast<std::size_t>(coefficient_count()), 0.0);
  const auto mb = static_cast<std::size_t>(max_basis_);
  for (std::size_t i = 0; i < sample_leaf_.size(); ++i) {
    const auto l = static_cast<std::size_t>(sample_leaf_[i]);
    const double y = ys[i * stride];
    const double* phi = &sample_phi_[i * mb];
    double* acc = &b[static_cast<std::size_t>(coef_offset_[l])];
    for (int r = 0; r < leaf_[l].basis; ++r) acc[r] += phi[r] * y;
  }
  for (std::size_t l = 0; l < leaf_.size(); ++l) {
    const int p = leaf_[l].basis;
    const Eigen::Map<const Eigen::VectorXd> rhs(&b[static_cast<std::size_t>(coef_offset_[l])], p);
    Eigen::Map<Eigen::VectorXd>(coef + coef_offset_[l], p) = leaf_[l].inverse * rhs;
  }
}

void LocalBasis::fit_weighted_into(const double* ys, const double* weight, double* coef) const {
  std::vector<double> b(static_cast<std::size_t>(coefficient_count()), 0.0);
  const auto mb = static_cast<std::size_t>(max_basis_);
  for (std::size_t i = 0; i < sample_leaf_.size(); ++i) {
    const auto l = static_cast<std::size_t>(sample_leaf_[i]);
    const double y = ys[i] * weight[i];
    const double* phi = &sample_phi_[i * mb];
    double* acc = &b[static_cast<std::size_t>(coef_offset_[l])];
    for (int r = 0; r < leaf_[l].basis; ++r) acc[r] += phi[r] * y;
  }
  for (std::size_t l = 0; l < leaf_.size(); ++l) {
    const int p = leaf_[l].basis;
    const Eigen::Map<const Eigen::VectorXd> rhs(&b[static_cast<std::size_t>(coef_offset_[l])], p);
    Eigen::Map<Eigen::VectorXd>(coef + coef_offset_[l], p) = leaf_[l].inverse * rhs;
  }
}

double LocalBasis::evaluate(const double* coef, const double* x) const {
  const int l = leaf_of(x);
  const Leaf& leaf = leaf_[static_cast<std::size_t>(l)];
  const double* c = coef + coef_offset_[static_cast<std::size_t>(l)];
  double v = c[0];
  for (std::size_t a = 0; a < leaf.active.size(); ++a) {
    v += c[a + 1] * (x[leaf.active[a]] - leaf.centre[a]) / leaf.scale[a];
  }
  return v;
}

double LocalBasis::evaluate_sample(const double* coef, std::size_t i) const {
  const auto l = static_cast<std::size_t>(sample_leaf_[i]);
  const double* c = coef + coef_offset_[l];
  const double* phi = &sample_phi_[i * static_cast<std::size_t>(max_basis_)];
  double v = 0.0;
  for (int r = 0; r < leaf_[l].basis; ++r) v += c[r] * phi[r];
  return v;
}

void LocalBasis::save(std::ostream& out) const {
  bin::put<std::int32_t>(out, dims_);
  bin::put<std::uint64_t>(out, node_.size());
  for (const auto& n : node_) {
    bin::put<std::int32_t>(out, n.dim);
    bin::put_vec(out, n.edges);
    bin::put_vec(out, n.children);
  }
  bin::put<std::uint64_t>(out, leaf_.size());
  for (const auto& l : leaf_) {
    bin::put<std::int32_t>(out, l.basis);
    bin::put_vec(out, l.active);
    bin::put_vec(out, l.centre);
    bin::put_vec(out, l.scale);
  }
}

std::shared_ptr<LocalBasis> LocalBasis::load(std::istream& in) {
  std::shared_ptr<LocalBasis> b(new LocalBasis());
  b->dims_ = bin::get<std::int32_t>(in);
  const auto nodes = bin::get<std::uint64_t>(in);
  if (nodes > (1u << 24)) throw std::runtime_error("archive: corrupt partition");
  b->node_.resize(nodes);
  for (auto& n : b->node_) {
    n.dim = bin::get<std::int32_t>(in);
    n.edges = bin::get_vec<double>(in);
    n.children = bin::get_vec<int>(in);
    if (n.children.size() != n.edges.size() + 1) throw std::runtime_error("archive: corrupt partition");
  }
  const auto leaves = bin::get<std::uint64_t>(in);
  if (leaves > (1u << 24)) throw std::runtime_error("archive: corrupt partition");
  b->leaf_.resize(leaves);
  b->coef_offset_.assign(1, 0);
  for (auto& l : b->leaf_) {
    l.basis = bin::get<std::int32_t>(in);
    l.active = bin::get_vec<int>(in);
    l.centre = bin::get_vec<double>(in);
    l.scale = bin::get_vec<double>(in);
    if (l.basis != 1 + static_cast<int>(l.active.size())) throw std::runtime_error("archive: corrupt leaf");
    b->coef_offset_.push_back(b->coef_offset_.back() + l.basis);
    b->max_basis_ = std::max(b->max_basis_, l.basis);
  }
  return b;
}

ConditionalEstimator fit(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                         const std::vector<int>& cells, const std::vector<int>& degree) {
  if (xs.rows() != ys.size()) throw std::invalid_argument("regression: xs and ys differ in length");
  auto basis = std::make_shared<const LocalBasis>(xs, cells, degree);
  ConditionalEstimator e{basis, basis->fit(ys.data())};
  return e;
}

}  // namespace swing
