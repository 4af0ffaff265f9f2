#pragma once

#include <stdexcept>
#include <string>

namespace flatmod {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define FLATMOD_ERROR(Name) \
    struct Name : Error {   \
        using Error::Error; \
    }

FLATMOD_ERROR(RankDeficient);
FLATMOD_ERROR(NotClosed);
FLATMOD_ERROR(CapExceeded);
FLATMOD_ERROR(ParseError);
FLATMOD_ERROR(IrrationalSplit);
FLATMOD_ERROR(UnclassifiableComponent);
FLATMOD_ERROR(PreconditionViolated);
FLATMOD_ERROR(UnknownSubgroup);
FLATMOD_ERROR(IndexCapExceeded);
FLATMOD_ERROR(InconsistentInvariants);
FLATMOD_ERROR(PairingIncomplete);
FLATMOD_ERROR(UnhandledAction);
FLATMOD_ERROR(MissingRotationGenerator);

#undef FLATMOD_ERROR

}  // namespace flatmod
