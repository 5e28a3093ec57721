#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nearsym {

/// Failure categories raised by the library. Each maps to one documented
/// error condition of an operation; callers can switch on `Error::code()`.
enum class Errc {
  NonConvergence,
  RealPole,
  SlowDecay,
  QuadratureFailure,
  NotNonnegative,
  NotSelfParaconjugate,
  PoleEvaluation,
  DomainViolation,
  NotH2Disk,
  NotStrictlyContractiveAtI,
  PoleCollision,
  IllConditioned,
  AlphaAtInfinity,
  NoSymmetricRestriction,
  NotDefectVector,
  NonDenselyDefinedExtension,
  SpectrumCollision,
  GaugeDegenerate,
  MeasureMismatch,
  RealZeroE,
  UnboundedMultiplier,
  NotPSD,
  NotUnital,
  ChannelMismatch,
  NoIsometry,
  NotFixingAlgebra,
  NotComposed,
  ContractivityViolation,
  NotRestrictable,
  FactorizationResidual,
  ConfigInvalid,
};

inline std::string_view to_string(Errc c) {
  switch (c) {
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::RealPole: return "RealPole";
    case Errc::SlowDecay: return "SlowDecay";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::NotNonnegative: return "NotNonnegative";
    case Errc::NotSelfParaconjugate: return "NotSelfParaconjugate";
    case Errc::PoleEvaluation: return "PoleEvaluation";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::NotH2Disk: return "NotH2Disk";
    case Errc::NotStrictlyContractiveAtI: return "NotStrictlyContractiveAtI";
    case Errc::PoleCollision: return "PoleCollision";
    case Errc::IllConditioned: return "IllConditioned";
    case Errc::AlphaAtInfinity: return "AlphaAtInfinity";
    case Errc::NoSymmetricRestriction: return "NoSymmetricRestriction";
    case Errc::NotDefectVector: return "NotDefectVector";
    case Errc::NonDenselyDefinedExtension: return "NonDenselyDefinedExtension";
    case Errc::SpectrumCollision: return "SpectrumCollision";
    case Errc::GaugeDegenerate: return "GaugeDegenerate";
    case Errc::MeasureMismatch: return "MeasureMismatch";
    case Errc::RealZeroE: return "RealZeroE";
    case Errc::UnboundedMultiplier: return "UnboundedMultiplier";
    case Errc::NotPSD: return "NotPSD";
    case Errc::NotUnital: return "NotUnital";
    case Errc::ChannelMismatch: return "ChannelMismatch";
    case Errc::NoIsometry: return "NoIsometry";
    case Errc::NotFixingAlgebra: return "NotFixingAlgebra";
    case Errc::NotComposed: return "NotComposed";
    case Errc::ContractivityViolation: return "ContractivityViolation";
    case Errc::NotRestrictable: return "NotRestrictable";
    case Errc::FactorizationResidual: return "FactorizationResidual";
    case Errc::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace nearsym
