#ifndef COVERT_ERRORS_HPP
#define COVERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace covert {

// Error taxonomy shared by the whole core and mirrored 1:1 by the C API's
// status codes (see include/covert/covert.h).
enum class errc {
    ok = 0,
    domain = 1,        // argument outside the mathematical domain
    numerical = 2,     // iteration/quadrature failed to meet its tolerance
    unachievable = 3,  // requested operating point does not exist
    config = 4,        // inconsistent run/sweep configuration
    io = 5,            // destination could not be written
    invalid_handle = 6 // null or foreign handle at the C boundary
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

struct domain_error : error {
    explicit domain_error(const std::string& what) : error(errc::domain, what) {}
};

// Carries the best estimate reached when an iterative scheme gives up, so
// callers can report "failed, got this far" instead of nothing.
struct numerical_error : error {
    numerical_error(const std::string& what, double estimate)
        : error(errc::numerical, what), achieved_estimate(estimate) {}

    double achieved_estimate;
};

struct unachievable_error : error {
    explicit unachievable_error(const std::string& what) : error(errc::unachievable, what) {}
};

struct config_error : error {
    explicit config_error(const std::string& what) : error(errc::config, what) {}
};

struct io_error : error {
    explicit io_error(const std::string& what) : error(errc::io, what) {}
};

} // namespace covert

#endif // COVERT_ERRORS_HPP
