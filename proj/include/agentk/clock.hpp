#pragma once

#include <cstdint>
#include <vector>

namespace agentk {

/// Sleep interface so retry delays can be observed and fast-forwarded in
/// tests instead of blocking real time.
struct SleepClock {
    virtual ~SleepClock() = default;
    virtual void sleep_ms(std::int64_t ms) = 0;
    virtual std::int64_t now_ms() const = 0;
};

/// Simulated clock: sleeping advances virtual time instantly and the
/// requested durations are recorded in order.
class VirtualClock final : public SleepClock {
public:
    explicit VirtualClock(std::int64_t start_ms = 0) : now_ms_(start_ms) {}

    void sleep_ms(std::int64_t ms) override {
        sleeps_.push_back(ms);
        now_ms_ += ms;
    }
    std::int64_t now_ms() const override { return now_ms_; }

    void advance_ms(std::int64_t ms) { now_ms_ += ms; }
    const std::vector<std::int64_t>& sleeps() const { return sleeps_; }

private:
    std::int64_t now_ms_ = 0;
    std::vector<std::int64_t> sleeps_;
};

}  // namespace agentk
