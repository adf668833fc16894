#pragma once

// Small RAII wrappers over FFTW. Planning is not thread-safe in FFTW, so plan
// creation and destruction go through one process-wide mutex; execution of
// distinct plans may run concurrently.

#include <fftw3.h>

#include <algorithm>
#include <cstddef>
#include <mutex>
#include <new>
#include <stdexcept>
#include <utility>

namespace sps::fft {

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class Buffer {
public:
    Buffer() = default;
    explicit Buffer(std::size_t n) : size_(n) {
        if (n == 0) return;
        data_ = fftw_alloc_real(n);
        if (!data_) throw std::bad_alloc();
        std::fill_n(data_, n, 0.0);
    }
    ~Buffer() { fftw_free(data_); }
    Buffer(Buffer&& o) noexcept : data_(std::exchange(o.data_, nullptr)), size_(std::exchange(o.size_, 0)) {}
    Buffer& operator=(Buffer&& o) noexcept {
        std::swap(data_, o.data_);
        std::swap(size_, o.size_);
        return *this;
    }
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;

    double* data() { return data_; }
    const double* data() const { return data_; }
    std::size_t size() const { return size_; }
    double* begin() { return data_; }
    double* end() { return data_ + size_; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

private:
    double* data_ = nullptr;
    std::size_t size_ = 0;
};

class Plan {
public:
    Plan() = default;
    template <class Make>
    explicit Plan(Make&& make) {
        std::lock_guard lock(planner_mutex());
        plan_ = make();
        if (!plan_) throw std::runtime_error("FFTW planning failed");
    }
    ~Plan() { reset(); }
    Plan(Plan&& o) noexcept : plan_(std::exchange(o.plan_, nullptr)) {}
    Plan& operator=(Plan&& o) noexcept {
        if (this != &o) {
            reset();
            plan_ = std::exchange(o.plan_, nullptr);
        }
        return *this;
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    void execute() const { fftw_execute(plan_); }
    explicit operator bool() const { return plan_ != nullptr; }

private:
    void reset() {
        if (!plan_) return;
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
        plan_ = nullptr;
    }
    fftw_plan plan_ = nullptr;
};

}  // namespace sps::fft
