#include "sps/errors.hpp"

#include <iostream>
#include <utility>

namespace sps {
namespace {

WarningHandler& handler() {
    static WarningHandler h = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler h) { return std::exchange(handler(), std::move(h)); }

void warn(const std::string& message) {
    if (handler()) handler()(message);
}

}  // namespace sps
