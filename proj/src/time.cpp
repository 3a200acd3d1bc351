#include "gridtwin/time.hpp"

#include <charconv>

#include <fmt/format.h>

#include "gridtwin/error.hpp"

namespace gridtwin {

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
    if (pos + len > text.size()) {
        throw DataError(fmt::format("malformed timestamp '{}'", text));
    }
    int value = 0;
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) {
        throw DataError(fmt::format("malformed timestamp '{}'", text));
    }
    return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c) {
        throw DataError(fmt::format("malformed timestamp '{}'", text));
    }
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    const int y = read_int(text, 0, 4);
    expect(text, 4, '-');
    const int mo = read_int(text, 5, 2);
    expect(text, 7, '-');
    const int d = read_int(text, 8, 2);
    if (text.size() <= 10 || (text[10] != 'T' && text[10] != ' ')) {
        throw DataError(fmt::format("malformed timestamp '{}'", text));
    }
    const int hh = read_int(text, 11, 2);
    expect(text, 13, ':');
    const int mm = read_int(text, 14, 2);
    std::size_t pos = 16;
    int ss = 0;
    if (pos < text.size() && text[pos] == ':') {
        ss = read_int(text, pos + 1, 2);
        pos += 3;
    }
    const std::string_view zone = text.substr(pos);
    if (!(zone.empty() || zone == "Z" || zone == "+00:00" || zone == "+0000")) {
        throw DataError(fmt::format("timestamp '{}' is not UTC", text));
    }

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) {
        throw DataError(fmt::format("invalid calendar value in timestamp '{}'", text));
    }
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    const hh_mm_ss hms{t - day_start};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                       hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

bool on_interval_grid(Timestamp t) {
    using namespace std::chrono;
    return t.time_since_epoch().count() % duration_cast<seconds>(kInterval).count() == 0;
}

}  // namespace gridtwin
