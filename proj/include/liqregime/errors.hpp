#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace liqregime {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A timestamp went backwards in a stream that must be non-decreasing.
class TimestampRegression : public Error {
public:
    TimestampRegression(std::int64_t seq, std::int64_t ts_prev, std::int64_t ts_now)
        : Error("timestamp regression at seq " + std::to_string(seq) + ": " +
                std::to_string(ts_prev) + " -> " + std::to_string(ts_now)),
          seq_(seq), ts_prev_(ts_prev), ts_now_(ts_now) {}

    std::int64_t seq() const noexcept { return seq_; }
    std::int64_t ts_prev() const noexcept { return ts_prev_; }
    std::int64_t ts_now() const noexcept { return ts_now_; }

private:
    std::int64_t seq_;
    std::int64_t ts_prev_;
    std::int64_t ts_now_;
};

}  // namespace liqregime
