#pragma once

#include <stdexcept>
#include <string>

namespace aircast {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define AIRCAST_DEFINE_ERROR(Name)          \
    class Name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

// dataset
AIRCAST_DEFINE_ERROR(SchemaError);
AIRCAST_DEFINE_ERROR(ParseError);
AIRCAST_DEFINE_ERROR(EmptyInputError);
AIRCAST_DEFINE_ERROR(ValidationError);
AIRCAST_DEFINE_ERROR(UnfillableColumnError);
AIRCAST_DEFINE_ERROR(GapError);
AIRCAST_DEFINE_ERROR(SplitError);
AIRCAST_DEFINE_ERROR(StateMismatchError);

// numerics
AIRCAST_DEFINE_ERROR(LengthError);
AIRCAST_DEFINE_ERROR(SingularityError);
AIRCAST_DEFINE_ERROR(DegenerateSeriesError);
AIRCAST_DEFINE_ERROR(ExhaustionError);
AIRCAST_DEFINE_ERROR(FeatureMismatchError);
AIRCAST_DEFINE_ERROR(ConfigError);

// neural
AIRCAST_DEFINE_ERROR(ShapeError);
AIRCAST_DEFINE_ERROR(DivergenceError);

// metrics
AIRCAST_DEFINE_ERROR(ZeroDenominatorError);
AIRCAST_DEFINE_ERROR(DegenerateDenominatorError);

// bench
AIRCAST_DEFINE_ERROR(SelectionError);
AIRCAST_DEFINE_ERROR(IoError);

#undef AIRCAST_DEFINE_ERROR

} // namespace aircast
