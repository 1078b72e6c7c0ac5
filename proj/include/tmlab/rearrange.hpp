#pragma once

// Sampled functions on box grids, their decreasing rearrangement, convex
// and Schwarz symmetrization, and the Polya-Szego / Hardy-Littlewood checks.

#include <cstdint>
#include <string>
#include <vector>

#include "tmlab/finsler.hpp"
#include "tmlab/profiles.hpp"

namespace tmlab {

/// Nonnegative values on the cells of a regular grid over the cube
/// [-cells*h/2, cells*h/2]^N (same cell count on every axis). Values are
/// stored with the last axis fastest.
class SampledFunction {
 public:
  SampledFunction(int dim, std::size_t cells, double h, std::vector<double> values);

  /// Samples f at the cell centers.
  template <class F>
  static SampledFunction from_function(int dim, std::size_t cells, double h, F&& f) {
    std::vector<double> values(checked_count(dim, cells));
    Vec x(dim);
    for (std::size_t i = 0; i < values.size(); ++i) {
      center_into(dim, cells, h, i, x);
      values[i] = f(std::span<const double>(x));
    }
    return SampledFunction(dim, cells, h, std::move(values));
  }

  int dim() const { return dim_; }
  std::size_t cells() const { return cells_; }
  double h() const { return h_; }
  double cell_volume() const;
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  Vec center(std::size_t i) const;

  /// Sum of u^q times the cell volume.
  double lq_norm(double q) const;
  /// |{u >= s}| counted in whole cells.
  double superlevel_measure(double s) const;
  double support_measure() const;

  /// Raw little-endian float64 values in `path` plus a JSON header in
  /// `path + ".hdr"` (N, cells, h, dtype, endianness).
  void write_binary(const std::string& path) const;
  static SampledFunction read_binary(const std::string& path);
  /// Index columns i0..i{N-1} then value; intended for small grids.
  void write_csv(const std::string& path) const;
  static SampledFunction read_csv(const std::string& path);

  static std::size_t checked_count(int dim, std::size_t cells);
  static void center_into(int dim, std::size_t cells, double h, std::size_t index, Vec& x);

 private:
  int dim_;
  std::size_t cells_;
  double h_;
  std::vector<double> values_;
};

/// u#(t) = values[i] on [i c, (i+1) c) for the positive cell values sorted
/// in decreasing order; zero for t >= count * c.
struct DecreasingRearrangement {
  std::vector<double> values;
  double cell_measure = 0.0;

  double operator()(double t) const;
  /// t_i = i c, i = 0..count.
  std::vector<double> breakpoints() const;
  double support_measure() const { return cell_measure * static_cast<double>(values.size()); }
  /// |{u# >= s}|.
  double superlevel_measure(double s) const;
};

DecreasingRearrangement decreasing_rearrangement(const SampledFunction& u);

/// r -> u#(kappa r^N). One node per `stride` sorted cells, placed at the
/// block's middle measure; a final zero node sits at the support radius
/// (kappa R^N = |supp u|).
RadialProfile symmetrize(const DecreasingRearrangement& rd, int dim, double kappa,
                         const std::string& gauge_label, std::size_t stride = 1);
RadialProfile convex_symmetrization(const SampledFunction& u, const Gauge& g, std::size_t stride = 1);
RadialProfile schwarz_symmetrization(const SampledFunction& u, std::size_t stride = 1);

/// |{x : u(F0(x)) >= s}| for a Wulff-radial profile.
double superlevel_measure(const RadialProfile& u, double s);

/// u(F0(x)) sampled at the cell centers of a grid.
SampledFunction lift_profile(const RadialProfile& u, const Gauge& g, std::size_t cells, double h);

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Node stride used for the symmetrized profile in the Polya-Szego check:
/// about (number of support cells)^0.6. Each node is the mean of its block,
/// which averages out the lattice jitter in consecutive level-set measures;
/// blocks this size keep the smoothing bias below the jitter on 64^2..512^2.
std::size_t polya_szego_stride(const SampledFunction& u);

/// lhs = grid sum of F(grad u)^N with forward differences,
/// rhs = N kappa int |u*'|^N r^{N-1} dr for the convex symmetrization.
InequalitySides check_polya_szego(const SampledFunction& u, const Gauge& g, std::size_t stride = 0);

/// lhs = sum f g cellvol, rhs = int f* g* dx, which for the step
/// rearrangements equals sum_i f#_i g#_i c exactly.
InequalitySides check_hardy_littlewood(const SampledFunction& f, const SampledFunction& g,
                                       const Gauge& gauge);

/// Random sum of compactly supported C^1 bumps (1 - |x-c|^2/rho^2)_+^2 on
/// the cube [-1, 1]^N; supports stay inside [-0.9, 0.9]^N.
SampledFunction multibump(int dim, std::size_t cells, std::uint64_t seed);

}  // namespace tmlab
