#pragma once
#include <cstddef>

namespace ealab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Uniform periodic grid on [0,2pi)^dim with n points per axis.
/// dim must be 2 or 3 and n a power of two >= 8.
class Grid {
public:
  Grid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t points() const { return points_; }
  double spacing() const { return kTwoPi / n_; }
  double volume() const { return volume_; }
  double cell_volume() const { return cell_volume_; }

  /// Signed wavenumber for FFT index i on one axis.
  int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }

  bool operator==(const Grid&) const = default;

private:
  int dim_ = 0;
  int n_ = 0;
  std::size_t points_ = 0;
  double volume_ = 0;
  double cell_volume_ = 0;
};

}  // namespace ealab
