#include "qbound/channel.hpp"

#include <cmath>
#include <sstream>

#include "qbound/digraph.hpp"
#include "qbound/error.hpp"

namespace qbound {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_channel: return "invalid_channel";
    case ErrorCode::alphabet_mismatch: return "alphabet_mismatch";
    case ErrorCode::not_in_p_pi: return "not_in_p_pi";
    case ErrorCode::singular_system: return "singular_system";
    case ErrorCode::periodic_class: return "periodic_class";
    case ErrorCode::not_certified: return "not_certified";
    case ErrorCode::extraction_failed: return "extraction_failed";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

UnifilarChannel::UnifilarChannel(std::size_t nx, std::size_t ny, std::size_t ns,
                                 std::vector<double> kernel, std::vector<std::size_t> next_state,
                                 std::vector<bool> input_mask, std::string name,
                                 std::vector<std::string> y_labels)
    : nx_(nx),
      ny_(ny),
      ns_(ns),
      kernel_(std::move(kernel)),
      next_state_(std::move(next_state)),
      mask_(std::move(input_mask)),
      has_mask_(!mask_.empty()),
      name_(std::move(name)),
      y_labels_(std::move(y_labels)) {
  if (nx_ == 0 || ny_ == 0 || ns_ == 0)
    throw Error(ErrorCode::invalid_channel, "alphabet sizes must be positive");
  const std::size_t cells = nx_ * ny_ * ns_;
  if (kernel_.size() != cells)
    throw Error(ErrorCode::invalid_channel, "kernel must have ny*nx*ns entries");
  if (next_state_.size() != cells)
    throw Error(ErrorCode::invalid_channel, "next_state must have nx*ny*ns entries");
  if (!has_mask_) mask_.assign(nx_ * ns_, true);
  if (mask_.size() != nx_ * ns_)
    throw Error(ErrorCode::invalid_channel, "input_mask must have nx*ns entries");
  if (!y_labels_.empty() && y_labels_.size() != ny_)
    throw Error(ErrorCode::invalid_channel, "y_labels must have ny entries");
}

std::string UnifilarChannel::y_label(std::size_t y) const {
  return y_labels_.empty() ? std::to_string(y) : y_labels_.at(y);
}

ValidationReport validate(const UnifilarChannel& ch) {
  ValidationReport report;
  for (std::size_t s = 0; s < ch.ns(); ++s) {
    bool any_allowed = false;
    for (std::size_t x = 0; x < ch.nx(); ++x) {
      any_allowed = any_allowed || ch.allowed(x, s);
      double sum = 0.0;
      for (std::size_t y = 0; y < ch.ny(); ++y) {
        double w = ch.prob(y, x, s);
        if (!(w >= 0.0 && w <= 1.0)) {
          std::ostringstream os;
          os << "probability W[y=" << y << "][x=" << x << "][s=" << s << "] = " << w
             << " outside [0,1]";
          report.issues.push_back(os.str());
        }
        sum += w;
        if (ch.next(x, y, s) >= ch.ns()) {
          std::ostringstream os;
          os << "next_state (x=" << x << ",y=" << y << ",s=" << s << ") = " << ch.next(x, y, s)
             << " out of range";
          report.issues.push_back(os.str());
        }
      }
      if (!(std::abs(sum - 1.0) <= kKernelTol)) {
        std::ostringstream os;
        os << "row (x=" << x << ",s=" << s << ") sums to " << sum;
        report.issues.push_back(os.str());
      }
    }
    if (!any_allowed) {
      std::ostringstream os;
      os << "input mask permits no input in state s=" << s;
      report.issues.push_back(os.str());
    }
  }
  return report;
}

void require_valid(const UnifilarChannel& ch) {
  auto report = validate(ch);
  if (report.ok()) return;
  std::string msg = "invalid channel";
  if (!ch.name().empty()) msg += " '" + ch.name() + "'";
  for (const auto& issue : report.issues) msg += "; " + issue;
  throw Error(ErrorCode::invalid_channel, msg);
}

bool is_strongly_connected(const UnifilarChannel& ch) {
  require_valid(ch);
  digraph::Adjacency g(ch.ns());
  for (std::size_t s = 0; s < ch.ns(); ++s)
    for (std::size_t x = 0; x < ch.nx(); ++x) {
      if (!ch.allowed(x, s)) continue;
      for (std::size_t y = 0; y < ch.ny(); ++y)
        if (ch.prob(y, x, s) > 0.0) g[s].push_back(ch.next(x, y, s));
    }
  return digraph::is_strongly_connected(g);
}

namespace {

void require_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw Error(ErrorCode::invalid_argument, std::string(what) + " must lie in [0,1]");
}

std::string param_name(const char* family, double v) {
  std::ostringstream os;
  os << family << ":" << v;
  return os.str();
}

}  // namespace

UnifilarChannel builtin_trapdoor(double p) {
  require_probability(p, "trapdoor parameter p");
  constexpr std::size_t n = 2;
  std::vector<double> kernel(n * n * n, 0.0);
  std::vector<std::size_t> next(n * n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t s = 0; s < n; ++s) {
      kernel[(s * n + x) * n + s] += p;
      kernel[(x * n + x) * n + s] += 1.0 - p;
      for (std::size_t y = 0; y < n; ++y) next[(x * n + y) * n + s] = s ^ x ^ y;
    }
  return UnifilarChannel(n, n, n, std::move(kernel), std::move(next), {},
                         param_name("trapdoor", p), {"0", "1"});
}

UnifilarChannel builtin_dec(double eps) {
  require_probability(eps, "erasure probability");
  constexpr std::size_t nx = 2, ny = 4, ns = 2;
  std::vector<double> kernel(ny * nx * ns, 0.0);
  std::vector<std::size_t> next(nx * ny * ns);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t s = 0; s < ns; ++s) {
      // x - s in {-1,0,1} maps to output index x - s + 1.
      std::size_t diff = x + 1 - s;
      kernel[(diff * nx + x) * ns + s] = 1.0 - eps;
      kernel[(dec_out::erasure * nx + x) * ns + s] = eps;
      for (std::size_t y = 0; y < ny; ++y) next[(x * ny + y) * ns + s] = x;
    }
  return UnifilarChannel(nx, ny, ns, std::move(kernel), std::move(next), {},
                         param_name("dec", eps), {"-1", "0", "1", "?"});
}

UnifilarChannel builtin_bec_no11(double eps) {
  require_probability(eps, "erasure probability");
  constexpr std::size_t nx = 2, ny = 3, ns = 2;
  std::vector<double> kernel(ny * nx * ns, 0.0);
  std::vector<std::size_t> next(nx * ny * ns);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t s = 0; s < ns; ++s) {
      kernel[(x * nx + x) * ns + s] = 1.0 - eps;
      kernel[(bec_out::erasure * nx + x) * ns + s] = eps;
      for (std::size_t y = 0; y < ny; ++y) next[(x * ny + y) * ns + s] = x;
    }
  std::vector<bool> mask(nx * ns, true);
  mask[1 * ns + 1] = false;
  return UnifilarChannel(nx, ny, ns, std::move(kernel), std::move(next), std::move(mask),
                         param_name("bec_no11", eps), {"0", "1", "?"});
}

}  // namespace qbound
