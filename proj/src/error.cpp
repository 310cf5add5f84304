#include "nsk/error.hpp"

namespace nsk {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parameter: return "parameter";
        case ErrorKind::constitutive: return "constitutive";
        case ErrorKind::root_finding: return "root-finding";
        case ErrorKind::hyperbolicity: return "hyperbolicity";
        case ErrorKind::structural: return "structural";
        case ErrorKind::not_coupled: return "not genuinely coupled";
        case ErrorKind::not_dissipative: return "not strictly dissipative";
        case ErrorKind::domain_violation: return "domain violation";
        case ErrorKind::blow_up: return "blow-up";
        case ErrorKind::grid_mismatch: return "grid mismatch";
        case ErrorKind::fit: return "fit";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

}  // namespace nsk
