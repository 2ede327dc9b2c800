#ifndef BILLIARDS_ERRORS_HPP
#define BILLIARDS_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace billiards {

// Base class for all domain errors. `name()` is the stable machine-readable
// identifier the CLI prints on the diagnostic stream before exiting with 1.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& detail)
        : std::runtime_error(name + ": " + detail), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define BILLIARDS_DEFINE_ERROR(ClassName)                                     \
    class ClassName : public Error {                                          \
    public:                                                                    \
        explicit ClassName(const std::string& detail)                         \
            : Error(#ClassName, detail) {}                                    \
    }

BILLIARDS_DEFINE_ERROR(InvalidCurve);
BILLIARDS_DEFINE_ERROR(InvalidBody);
BILLIARDS_DEFINE_ERROR(InvalidWord);
BILLIARDS_DEFINE_ERROR(InvalidPeriod);
BILLIARDS_DEFINE_ERROR(PointInsideBody);
BILLIARDS_DEFINE_ERROR(NoConvergence);
BILLIARDS_DEFINE_ERROR(DegeneratePolygon);
BILLIARDS_DEFINE_ERROR(OrbitNotClosed);
BILLIARDS_DEFINE_ERROR(NotPeriodic);
BILLIARDS_DEFINE_ERROR(ParallelTangents);
BILLIARDS_DEFINE_ERROR(NotClosed);
BILLIARDS_DEFINE_ERROR(InadmissibleChord);
BILLIARDS_DEFINE_ERROR(NoAdmissibleImage);
BILLIARDS_DEFINE_ERROR(DegenerateChord);
BILLIARDS_DEFINE_ERROR(TangentialChord);
BILLIARDS_DEFINE_ERROR(OutsideWindow);
BILLIARDS_DEFINE_ERROR(IoError);

#undef BILLIARDS_DEFINE_ERROR

} // namespace billiards

#endif
