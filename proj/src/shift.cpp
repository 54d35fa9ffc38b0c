#include "ssf/shift.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <stdexcept>

#include "ssf/io.hpp"
#include "ssf/spectral.hpp"

namespace ssf {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::direct:
      return "direct";
    case Provenance::compression:
      return "compression";
    case Provenance::monotone_split:
      return "monotone_split";
    case Provenance::h_transform:
      return "h_transform";
  }
  return "unknown";
}

std::string pair_hash(const HermitianOperator& a, const HermitianOperator& b) {
  std::string bytes;
  auto feed = [&bytes](const void* p, std::size_t n) { bytes.append(static_cast<const char*>(p), n); };
  for (const HermitianOperator* op : {&a, &b}) {
    for (std::size_t k = 0; k < op->algebra().block_count(); ++k) {
      const std::uint64_t dim = op->algebra().dim(k);
      const double scale = op->algebra().scale(k);
      feed(&dim, sizeof dim);
      feed(&scale, sizeof scale);
      const Matrix& m = op->block(k);
      feed(m.data(), sizeof(Complex) * static_cast<std::size_t>(m.size()));
    }
  }
  return sha256_hex(bytes);
}

namespace {

double union_diameter(const SpectralDecomposition& sa, const SpectralDecomposition& sb) {
  return std::max(sa.max_eigenvalue(), sb.max_eigenvalue()) - std::min(sa.min_eigenvalue(), sb.min_eigenvalue());
}

StepFunction direct_xi(const SpectralDecomposition& sa, const SpectralDecomposition& sb) {
  return subtract(counting_function(sa), counting_function(sb), tolerance::merge * union_diameter(sa, sb));
}

}  // namespace

double pair_diameter(const HermitianOperator& a, const HermitianOperator& b) {
  return union_diameter(spectral_decompose(a), spectral_decompose(b));
}

namespace {

double value_scale(const StepFunction& x, const StepFunction& y) {
  return tolerance::value * std::max({1.0, x.linf_norm(), y.linf_norm()});
}

bool values_match(const StepFunction& x, const StepFunction& y, double tol) {
  if (x.values().size() != y.values().size()) return false;
  for (std::size_t j = 0; j < x.values().size(); ++j) {
    if (std::fabs(x.values()[j] - y.values()[j]) > tol) return false;
  }
  return true;
}

}  // namespace

bool same_shift(const StepFunction& x, const StepFunction& y, double diameter, double rel_tol) {
  const double vt = value_scale(x, y);
  return x.simplified(0.0, vt).approx_equal(y.simplified(0.0, vt), rel_tol * std::max(diameter, 1e-300), vt);
}

double route_deviation(const StepFunction& x, const StepFunction& y) {
  const double vt = value_scale(x, y);
  const auto xs = x.simplified(0.0, vt);
  const auto ys = y.simplified(0.0, vt);
  if (!values_match(xs, ys, vt)) return std::numeric_limits<double>::infinity();
  return xs.max_breakpoint_deviation(ys);
}

ShiftFunction ssf_direct(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_algebra(a, b, "ssf_direct");
  return {direct_xi(spectral_decompose(a), spectral_decompose(b)), Provenance::direct, pair_hash(a, b)};
}

bool BoundsReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

BoundsReport ssf_bounds_report(const StepFunction& xi, const HermitianOperator& a, const HermitianOperator& b) {
  require_same_algebra(a, b, "ssf_bounds_report");
  const auto sv = spectral_decompose(a - b);
  const double v1 = schatten_norm(sv, 1.0);
  const double tol = 1e-9 * (1.0 + v1);
  BoundsReport rep;
  rep.ordered = sv.min_eigenvalue() >= -tolerance::rank * std::max(1.0, sv.norm_inf());
  auto add = [&](std::string name, double left, double right, bool eq) {
    const bool pass = eq ? std::fabs(left - right) <= tol : left <= right + tol;
    rep.checks.push_back({std::move(name), left, right, tol, eq, pass});
  };
  add("l1_bound", xi.l1_norm(), v1, false);
  add("integral", xi.integral(), sv.trace_of([](double x) { return x; }), true);
  add("linf_bound", xi.linf_norm(), support_trace(sv), false);
  if (rep.ordered) {
    add("l1_equality", xi.l1_norm(), v1, true);
    add("nonnegative", -xi.min_value(), 0.0, false);
  }
  return rep;
}

namespace {

struct Compressed {
  HermitianOperator a;
  HermitianOperator b;
};

// Isometries onto the range of p, block by block. Exact coordinate selection
// is used when p is a 0/1 diagonal.
std::vector<Matrix> range_isometries(const HermitianOperator& p) {
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < p.blocks().size(); ++k) {
    const Matrix& pk = p.block(k);
    const auto n = pk.rows();
    const bool coordinate = pk.isDiagonal(0.0) && (pk.diagonal().array() == Complex(0.0) ||
                                                   pk.diagonal().array() == Complex(1.0)).all();
    std::vector<Eigen::VectorXcd> cols;
    if (coordinate) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (pk(i, i) == Complex(1.0)) cols.push_back(Eigen::VectorXcd::Unit(n, i));
      }
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(pk);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (es.eigenvalues()(i) > 0.5) cols.push_back(es.eigenvectors().col(i));
      }
    }
    Matrix q(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) q.col(static_cast<Eigen::Index>(j)) = cols[j];
    out.push_back(std::move(q));
  }
  return out;
}

std::optional<Compressed> compress(const HermitianOperator& a, const HermitianOperator& b,
                                   const HermitianOperator& p) {
  const auto qs = range_isometries(p);
  std::vector<Block> blocks;
  std::vector<Matrix> ab, bb;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    if (qs[k].cols() == 0) continue;
    blocks.push_back({static_cast<std::size_t>(qs[k].cols()), a.algebra().scale(k)});
    ab.push_back(qs[k].adjoint() * a.block(k) * qs[k]);
    bb.push_back(qs[k].adjoint() * b.block(k) * qs[k]);
  }
  if (blocks.empty()) return std::nullopt;
  TraceAlgebra alg(std::move(blocks));
  return Compressed{HermitianOperator(alg, std::move(ab)), HermitianOperator(alg, std::move(bb))};
}

}  // namespace

CompressionResult ssf_via_compressions(const HermitianOperator& a, const HermitianOperator& b,
                                       const std::vector<HermitianOperator>& projections, int max_moment) {
  require_same_algebra(a, b, "ssf_via_compressions");
  if (max_moment < 1) throw std::domain_error("ssf_via_compressions: max_moment must be >= 1");
  if (!dominates(a, b) || !dominates(b, HermitianOperator::zero(b.algebra()))) {
    throw std::domain_error("ssf_via_compressions: requires A >= B >= 0");
  }
  for (std::size_t n = 0; n < projections.size(); ++n) {
    require_same_algebra(a, projections[n], "ssf_via_compressions");
    if (!is_projection(projections[n])) {
      throw std::domain_error("ssf_via_compressions: entry " + std::to_string(n) + " is not a projection");
    }
    if (n > 0 && !projection_leq(projections[n - 1], projections[n])) {
      throw std::domain_error("ssf_via_compressions: projections not increasing at entry " + std::to_string(n));
    }
  }
  const auto sa = spectral_decompose(a);
  const auto sb = spectral_decompose(b);
  const double na = sa.norm_inf();
  const double nb = sb.norm_inf();
  const std::string id = pair_hash(a, b);
  CompressionResult res;
  for (std::size_t n = 0; n < projections.size(); ++n) {
    const auto& p = projections[n];
    const double ca = commutator_hs_norm(a, p);
    const double cb = commutator_hs_norm(b, p);
    const auto comp = compress(a, b, p);
    std::optional<SpectralDecomposition> spa, spb;
    StepFunction xi(0.0);
    if (comp) {
      spa = spectral_decompose(comp->a);
      spb = spectral_decompose(comp->b);
      xi = direct_xi(*spa, *spb);
    }
    res.steps.push_back({p.trace(), {xi, Provenance::compression, id}, ca, cb});
    const HermitianOperator one_minus_p = HermitianOperator::identity(p.algebra()) - p;
    for (int m = 1; m <= max_moment; ++m) {
      const double comp_a = comp ? trace_power(comp->a, m) : 0.0;
      const double comp_b = comp ? trace_power(comp->b, m) : 0.0;
      const double half = 0.5 * m * (m - 1);
      MomentRow row{};
      row.step = n;
      row.m = m;
      row.moment = xi.moment(m);
      row.target = trace_power(a, m) - trace_power(b, m);
      row.defect_a = std::fabs(comp_a - trace_power(a, m, &p));
      row.defect_b = std::fabs(comp_b - trace_power(b, m, &p));
      row.bound_a = half * ca * ca * std::pow(na, m - 2);
      row.bound_b = half * cb * cb * std::pow(nb, m - 2);
      row.tail = trace_power(a, m, &one_minus_p) - trace_power(b, m, &one_minus_p);
      res.moments.push_back(row);
    }
  }
  return res;
}

MonotoneSplit ssf_monotone_split(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_algebra(a, b, "ssf_monotone_split");
  const HermitianOperator c = a + pos_neg_parts(b - a).positive;
  const auto sa = spectral_decompose(a);
  const auto sb = spectral_decompose(b);
  const auto sc = spectral_decompose(c);
  const std::string id = pair_hash(a, b);
  MonotoneSplit out{c,
                    {direct_xi(sc, sa), Provenance::monotone_split, pair_hash(c, a)},
                    {direct_xi(sc, sb), Provenance::monotone_split, pair_hash(c, b)},
                    {StepFunction(0.0), Provenance::monotone_split, id},
                    {direct_xi(sa, sb), Provenance::direct, id},
                    false,
                    false,
                    false};
  const double diam = std::max({sa.max_eigenvalue(), sb.max_eigenvalue(), sc.max_eigenvalue()}) -
                      std::min({sa.min_eigenvalue(), sb.min_eigenvalue(), sc.min_eigenvalue()});
  out.xi_ab.xi = subtract(out.xi_cb.xi, out.xi_ca.xi, tolerance::merge * diam);
  out.c_dominates = dominates(c, a) && dominates(c, b);
  out.parts_nonnegative = out.xi_ca.xi.min_value() >= 0.0 && out.xi_cb.xi.min_value() >= 0.0;
  out.identity_holds = same_shift(out.xi_ab.xi, out.direct.xi, diam);
  return out;
}

std::vector<TruncationRow> ssf_truncation_sequence(const HermitianOperator& a, const HermitianOperator& b,
                                                   const std::vector<std::size_t>& ranks) {
  require_same_algebra(a, b, "ssf_truncation_sequence");
  if (!dominates(a, b)) throw std::domain_error("ssf_truncation_sequence: requires A >= B");
  for (std::size_t i = 1; i < ranks.size(); ++i) {
    if (ranks[i] < ranks[i - 1]) throw std::domain_error("ssf_truncation_sequence: ranks must be ascending");
  }
  const HermitianOperator v = a - b;
  const auto sv = spectral_decompose(v);
  const auto reference = ssf_direct(a, b).xi;
  const double total = sv.algebra().total_dimension();
  const auto order = sv.weighted_spectrum();  // ascending
  std::vector<TruncationRow> rows;
  for (std::size_t r : ranks) {
    if (static_cast<double>(r) > total) {
      throw std::domain_error("ssf_truncation_sequence: rank " + std::to_string(r) + " exceeds the dimension");
    }
    // the r largest eigenvalues, counted over all blocks; negatives are rounding and drop out
    std::vector<Eigen::VectorXd> keep;
    for (const auto& blk : sv.blocks()) keep.push_back(Eigen::VectorXd::Zero(blk.eigenvalues.size()));
    std::vector<std::size_t> taken(sv.blocks().size(), 0);
    for (std::size_t i = 0; i < r; ++i) {
      const auto& e = order[order.size() - 1 - i];
      const auto& ev = sv.blocks()[e.block].eigenvalues;
      // ascending within the block, so the next from the top
      const auto idx = ev.size() - 1 - static_cast<Eigen::Index>(taken[e.block]++);
      keep[e.block](idx) = std::max(ev(idx), 0.0);
    }
    std::vector<Matrix> dblocks;
    double d_norm = 0.0;
    double d_error = 0.0;
    for (std::size_t k = 0; k < sv.blocks().size(); ++k) {
      const auto& blk = sv.blocks()[k];
      dblocks.push_back(blk.eigenvectors * keep[k].cast<Complex>().asDiagonal() * blk.eigenvectors.adjoint());
      d_norm += blk.weight * keep[k].sum();
      d_error += blk.weight * (blk.eigenvalues - keep[k]).cwiseAbs().sum();
    }
    const HermitianOperator d(v.algebra(), std::move(dblocks));
    const auto sbd = spectral_decompose(b + d);
    const auto sb = spectral_decompose(b);
    const auto xi = direct_xi(sbd, sb);
    const double diam = std::max(union_diameter(sbd, sb), reference.breakpoints().empty()
                                                              ? 0.0
                                                              : reference.breakpoints().back() -
                                                                    reference.breakpoints().front());
    const double xi_error = subtract(xi, reference, tolerance::merge * diam).l1_norm();
    rows.push_back({r, xi_error, d_error, xi.l1_norm(), d_norm});
  }
  return rows;
}

HTransformResult ssf_via_h(const HermitianOperator& a, const HermitianOperator& b, const BijectionH& h) {
  require_same_algebra(a, b, "ssf_via_h");
  HTransformResult out{{StepFunction(0.0), Provenance::h_transform, pair_hash(a, b)}, StepFunction(0.0), {}};
  const auto sa = spectral_decompose(a);
  const auto sb = spectral_decompose(b);
  auto hv = [&h](double x) { return h.value(x); };
  const auto sha = spectral_decompose(sa.apply(hv));
  const auto shb = spectral_decompose(sb.apply(hv));

  // distinct eigenvalues that h maps to numerically equal values
  const double merge_x = tolerance::merge * union_diameter(sa, sb);
  const double merge_y = tolerance::merge * union_diameter(sha, shb);
  auto spec_a = sa.weighted_spectrum();
  auto spec_b = sb.weighted_spectrum();
  std::vector<double> xs;
  for (const auto& e : spec_a) xs.push_back(e.value);
  for (const auto& e : spec_b) xs.push_back(e.value);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] - xs[i - 1] > merge_x && std::fabs(h.value(xs[i]) - h.value(xs[i - 1])) <= merge_y) {
      out.warnings.push_back("eigenvalues " + format_double(xs[i - 1]) + " and " + format_double(xs[i]) +
                             " coincide after " + h.label());
    }
  }
  for (double x : {xs.front(), xs.back()}) {
    const double y = h.value(x);
    if (!(y > h.lower() && y < h.upper())) {
      throw std::domain_error("ssf_via_h: " + h.label() + " saturates at eigenvalue " + format_double(x));
    }
  }

  out.transformed = direct_xi(sha, shb);
  out.xi.xi = out.transformed.mapped_breakpoints([&h](double y) { return h.inverse(y); });
  return out;
}

}  // namespace ssf
