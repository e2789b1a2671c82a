#pragma once

#include <stdexcept>
#include <string>

namespace nonlocal {

// Every failure carries a short kind name; the CLI prints it verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define NONLOCAL_ERROR(Name)                                              \
    struct Name : Error {                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}    \
    };

NONLOCAL_ERROR(DomainError)
NONLOCAL_ERROR(NonConvergence)
NONLOCAL_ERROR(PoleError)
NONLOCAL_ERROR(IntegrabilityError)
NONLOCAL_ERROR(SingularPoint)
NONLOCAL_ERROR(UnsupportedDimension)
NONLOCAL_ERROR(DivergentInteraction)
NONLOCAL_ERROR(NoPlateau)
NONLOCAL_ERROR(RegularityError)
NONLOCAL_ERROR(ExcessTruncation)
NONLOCAL_ERROR(SingularState)
NONLOCAL_ERROR(BlowupGuard)

#undef NONLOCAL_ERROR

}  // namespace nonlocal
