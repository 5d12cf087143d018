#include "pvsde/error.hpp"

namespace pvsde {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Data: return "data";
        case ErrorKind::Stability: return "stability";
        case ErrorKind::Degenerate: return "degenerate";
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Training: return "training";
        case ErrorKind::UndefinedMetric: return "undefined_metric";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace pvsde
