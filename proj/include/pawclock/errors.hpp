#pragma once

#include <stdexcept>
#include <string>

namespace pawclock {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

/// The constraint operator has no eigenvalue within tolerance of zero.
class EmptyKernel : public Error {
 public:
  using Error::Error;
};

/// Conditioning on a time state whose amplitude a(t) is at or below the floor.
class ZeroAmplitude : public Error {
 public:
  ZeroAmplitude(double label, double amplitude)
      : Error("conditional amplitude " + std::to_string(amplitude) +
              " at t=" + std::to_string(label) + " is below the floor"),
        label_(label),
        amplitude_(amplitude) {}

  double label() const noexcept { return label_; }
  double amplitude() const noexcept { return amplitude_; }

 private:
  double label_;
  double amplitude_;
};

class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class InfeasibleResolution : public Error {
 public:
  using Error::Error;
};

/// Redshift operator has an eigenvalue within tolerance of zero.
class NonInvertible : public Error {
 public:
  using Error::Error;
};

/// Geometric series requested while the spectral radius of Phi is >= 1.
class SeriesDivergent : public Error {
 public:
  using Error::Error;
};

class CalledOnInvertible : public Error {
 public:
  using Error::Error;
};

}  // namespace pawclock
