#include "ebvs/event_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ebvs {
namespace {

[[noreturn]] void malformed(std::size_t line_no, const char* what) {
    std::ostringstream os;
    os << "event file line " << line_no << ": " << what;
    throw std::runtime_error(os.str());
}

// Parses "key=value" out of the header tail.
int header_int(const std::string& header, const char* key, std::size_t line_no) {
    const auto pos = header.find(key);
    if (pos == std::string::npos) malformed(line_no, "missing header field");
    const char* s = header.c_str() + pos + std::strlen(key);
    int value = 0;
    const auto [p, ec] = std::from_chars(s, header.c_str() + header.size(), value);
    if (ec != std::errc{} || value <= 0) malformed(line_no, "bad header field");
    (void)p;
    return value;
}

template <typename T>
const char* parse_field(const char* s, const char* end, T& out, std::size_t line_no,
                        bool last) {
    const auto [p, ec] = std::from_chars(s, end, out);
    if (ec != std::errc{}) malformed(line_no, "bad numeric field");
    if (!last) {
        if (p == end || *p != ',') malformed(line_no, "expected comma");
        return p + 1;
    }
    return p;
}

}  // namespace

EventFile read_event_file(std::istream& in) {
    EventFile file;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw std::runtime_error("empty event file");
    ++line_no;
    if (line.rfind("# ebvs-events v1", 0) != 0) {
        throw std::runtime_error("event file missing v1 header");
    }
    file.width = header_int(line, "width=", line_no);
    file.height = header_int(line, "height=", line_no);

    StreamOrderGuard order;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const char* s = line.c_str();
        const char* end = s + line.size();
        std::uint64_t t = 0;
        unsigned u = 0, v = 0, pol = 0;
        s = parse_field(s, end, t, line_no, false);
        s = parse_field(s, end, u, line_no, false);
        s = parse_field(s, end, v, line_no, false);
        s = parse_field(s, end, pol, line_no, true);
        if (pol > 1) malformed(line_no, "polarity must be 0 or 1");
        if (u >= static_cast<unsigned>(file.width) || v >= static_cast<unsigned>(file.height)) {
            throw ContractViolation("event pixel outside declared sensor size");
        }
        order.check(t);
        file.events.push_back({static_cast<std::uint16_t>(u), static_cast<std::uint16_t>(v), t,
                               static_cast<std::int8_t>(pol == 1 ? 1 : -1)});
    }
    return file;
}

EventFile read_event_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event file: " + path);
    return read_event_file(in);
}

void write_event_header(std::ostream& out, int width, int height) {
    out << "# ebvs-events v1 width=" << width << " height=" << height << "\n";
}

void write_event_line(std::ostream& out, const Event& e) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof(buf), "%llu,%u,%u,%d\n",
                                static_cast<unsigned long long>(e.t),
                                static_cast<unsigned>(e.u), static_cast<unsigned>(e.v),
                                e.polarity > 0 ? 1 : 0);
    out.write(buf, n);
}

void write_event_file(const std::string& path, int width, int height,
                      const std::vector<Event>& events) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_event_header(out, width, height);
    for (const auto& e : events) write_event_line(out, e);
}

}  // namespace ebvs
