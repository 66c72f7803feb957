#include "pspm/weights.hpp"

#include <cmath>
#include <string>

namespace pspm {

namespace {

bool sign_ok(NeuronClass c, double v) {
  return c == NeuronClass::excitatory ? v >= 0.0 : v <= 0.0;
}

std::string entry(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

WeightMatrix::WeightMatrix(std::vector<NeuronClass> classes)
    : n_(classes.size()), classes_(std::move(classes)), w_(n_ * n_, 0.0) {
  if (n_ == 0) throw std::invalid_argument("weight matrix must have at least one neuron");
}

WeightMatrix::WeightMatrix(std::vector<NeuronClass> classes, std::vector<double> dense)
    : n_(classes.size()), classes_(std::move(classes)), w_(std::move(dense)) {
  if (n_ == 0) throw std::invalid_argument("weight matrix must have at least one neuron");
  if (w_.size() != n_ * n_) {
    throw std::invalid_argument("weight matrix: expected " + std::to_string(n_ * n_) + " entries, got " +
                                std::to_string(w_.size()));
  }
  validate();
}

void WeightMatrix::set(std::size_t post, std::size_t pre, double value) {
  if (post == pre && value != 0.0) throw SignViolation("self-synapse " + entry(post, pre) + " must stay zero");
  if (!sign_ok(classes_[pre], value) || !std::isfinite(value)) {
    throw SignViolation("weight " + entry(post, pre) + " has the wrong sign for its class");
  }
  w_[post * n_ + pre] = value;
}

void WeightMatrix::add_clipped(std::size_t post, std::size_t pre, double delta) {
  if (post == pre) throw SignViolation("self-synapse " + entry(post, pre) + " cannot be updated");
  double& w = w_[post * n_ + pre];
  w += delta;
  if (classes_[pre] == NeuronClass::excitatory) {
    if (w < 0.0) w = 0.0;
  } else if (w > 0.0) {
    w = 0.0;
  }
}

void WeightMatrix::validate() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = w_[i * n_ + j];
      if (!std::isfinite(v)) throw SignViolation("weight " + entry(i, j) + " is not finite");
      if (i == j && v != 0.0) throw SignViolation("self-synapse " + entry(i, j) + " is nonzero");
      if (!sign_ok(classes_[j], v)) throw SignViolation("weight " + entry(i, j) + " has the wrong sign for its class");
    }
  }
}

void NeuronParams::validate() const {
  if (!(tau > 0 && r_m > 0 && v_th > 0 && dt > 0)) {
    throw std::invalid_argument("neuron params: tau, r_m, v_th and dt must be positive");
  }
  if (!(inhibitory_fraction >= 0.0 && inhibitory_fraction <= 1.0)) {
    throw std::invalid_argument("neuron params: inhibitory_fraction must lie in [0, 1]");
  }
}

}  // namespace pspm
