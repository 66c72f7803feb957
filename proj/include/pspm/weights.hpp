#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pspm {

enum class NeuronClass : unsigned char { excitatory, inhibitory };

class SignViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Signed synaptic strengths in volts; w(i, j) is the synapse from pre j onto post i.
/// Column j carries the sign of neuron j's class and the diagonal is zero.
class WeightMatrix {
 public:
  explicit WeightMatrix(std::vector<NeuronClass> classes);
  /// `dense` is row-major n x n. Throws SignViolation if the invariants fail.
  WeightMatrix(std::vector<NeuronClass> classes, std::vector<double> dense);

  std::size_t size() const { return n_; }
  double operator()(std::size_t post, std::size_t pre) const { return w_[post * n_ + pre]; }
  NeuronClass neuron_class(std::size_t j) const { return classes_[j]; }
  const std::vector<NeuronClass>& classes() const { return classes_; }
  std::span<const double> data() const { return w_; }

  /// Sets an entry; the value must respect the column's sign.
  void set(std::size_t post, std::size_t pre, double value);
  /// Adds `delta`, then clamps at zero so the entry never changes sign.
  void add_clipped(std::size_t post, std::size_t pre, double delta);

  /// Throws SignViolation naming the first bad entry.
  void validate() const;

  bool operator==(const WeightMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<NeuronClass> classes_;
  std::vector<double> w_;
};

/// Parameters of the leaky integrate-and-fire neuron, in SI units.
struct NeuronParams {
  double tau = 30e-3;           // s
  double r_m = 100e6;           // ohm
  double v_th = 30e-3;          // V
  double dt = 3e-3;             // s
  double inhibitory_fraction = 0.2;

  void validate() const;
};

}  // namespace pspm
