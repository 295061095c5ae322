#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qbound {

/// Unifilar finite-state channel: kernel W(y|x,s) and a deterministic
/// next-state table f(x,y,s). Inputs may be restricted per state by a mask.
/// Immutable once built.
class UnifilarChannel {
 public:
  /// kernel is laid out [y][x][s], next_state [x][y][s], mask [x][s].
  /// An empty mask means every input is permitted in every state.
  /// Throws Error(invalid_channel) only on shape mismatch; use validate() for content.
  UnifilarChannel(std::size_t nx, std::size_t ny, std::size_t ns, std::vector<double> kernel,
                  std::vector<std::size_t> next_state, std::vector<bool> input_mask = {},
                  std::string name = {}, std::vector<std::string> y_labels = {});

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t ns() const { return ns_; }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& y_labels() const { return y_labels_; }

  double prob(std::size_t y, std::size_t x, std::size_t s) const {
    return kernel_[(y * nx_ + x) * ns_ + s];
  }
  std::size_t next(std::size_t x, std::size_t y, std::size_t s) const {
    return next_state_[(x * ny_ + y) * ns_ + s];
  }
  bool allowed(std::size_t x, std::size_t s) const { return mask_[x * ns_ + s]; }
  bool has_mask() const { return has_mask_; }

  const std::vector<double>& kernel() const { return kernel_; }
  const std::vector<std::size_t>& next_state() const { return next_state_; }
  const std::vector<bool>& mask() const { return mask_; }

  /// Label for output y; falls back to the index.
  std::string y_label(std::size_t y) const;

 private:
  std::size_t nx_, ny_, ns_;
  std::vector<double> kernel_;
  std::vector<std::size_t> next_state_;
  std::vector<bool> mask_;
  bool has_mask_;
  std::string name_;
  std::vector<std::string> y_labels_;
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

inline constexpr double kKernelTol = 1e-12;

/// Lists every violated channel invariant (row sums, ranges, next-state range, empty mask rows).
ValidationReport validate(const UnifilarChannel& channel);

/// Throws Error(invalid_channel) carrying the joined report if validation fails.
void require_valid(const UnifilarChannel& channel);

/// Strong connectivity of the state graph with edges s -> f(x,y,s) for
/// permitted x and W(y|x,s) > 0.
bool is_strongly_connected(const UnifilarChannel& channel);

/// Trapdoor channel: y = s with probability p, y = x otherwise; s' = s ^ x ^ y.
UnifilarChannel builtin_trapdoor(double p);

/// Dicode erasure channel, outputs ordered (-1, 0, 1, ?); state is the last input.
UnifilarChannel builtin_dec(double eps);

/// Binary erasure channel with no two consecutive ones; outputs ordered (0, 1, ?).
UnifilarChannel builtin_bec_no11(double eps);

namespace dec_out {
inline constexpr std::size_t minus = 0, zero = 1, plus = 2, erasure = 3;
}
namespace bec_out {
inline constexpr std::size_t zero = 0, one = 1, erasure = 2;
}

}  // namespace qbound
