#include "tradenet/error.hpp"

namespace tradenet {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::IoError: return "IoError";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::DuplicateDate: return "DuplicateDate";
    case Errc::InvalidSplit: return "InvalidSplit";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::WindowTooLarge: return "WindowTooLarge";
    case Errc::NumericalInstability: return "NumericalInstability";
    case Errc::SingularRegression: return "SingularRegression";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::InvalidOrder: return "InvalidOrder";
    case Errc::NoConvergedModel: return "NoConvergedModel";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::CorruptPayload: return "CorruptPayload";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::MissingActuals: return "MissingActuals";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ZeroActual: return "ZeroActual";
    case Errc::InvalidPeriod: return "InvalidPeriod";
    case Errc::InsufficientBars: return "InsufficientBars";
    case Errc::UnknownDate: return "UnknownDate";
    case Errc::NegativeBudget: return "NegativeBudget";
    case Errc::NoTrades: return "NoTrades";
    case Errc::UndefinedRatio: return "UndefinedRatio";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace tradenet
