#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace singbsde::csv {

// 17 significant digits: parses back to the same double.
inline std::string number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Writer {
public:
    Writer(std::ostream& out, std::initializer_list<std::string_view> header) : out_(out) {
        bool first = true;
        for (auto name : header) {
            if (!first) out_ << ',';
            out_ << name;
            first = false;
        }
        out_ << '\n';
    }

    template <class... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((put(fields, first)), ...);
        out_ << '\n';
    }

private:
    template <class T>
    void put(const T& value, bool& first) {
        if (!first) out_ << ',';
        first = false;
        if constexpr (std::is_floating_point_v<T>) {
            out_ << number(static_cast<double>(value));
        } else {
            out_ << value;
        }
    }

    std::ostream& out_;
};

}  // namespace singbsde::csv
