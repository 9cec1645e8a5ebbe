#pragma once

// Shared plumbing for the selfrocket command-line tool: exit-code policy,
// number formatting for CSV output, and dataset file lookup.

#include <array>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "selfrocket/error.hpp"

namespace cli {

// Exit-code policy:
//   2  bad invocation or bad input (missing files, unparsable data, invalid
//      configuration, degenerate labels, splits that cannot be built)
//   3  structural mismatches and bad model files (wrong series length,
//      corrupt/truncated model, unsupported model version)
//   1  anything else
template <typename F>
int guarded(F&& fn) {
    using namespace selfrocket;
    try {
        return fn();
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IntegrityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IncompatibilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IOError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const EmptyInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const StratificationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateLabelsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

// Shortest decimal string that parses back to exactly the same double.
// Every numeric cell the harness writes goes through this, which is what
// makes CSV -> parse -> rewrite round trips byte-stable.
inline std::string fmt_double(double v) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(const std::string& s, const std::string& context) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw selfrocket::ParseError(context + ": cannot parse '" + s + "' as a number");
    return v;
}

inline long parse_long(const std::string& s, const std::string& context) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw selfrocket::ParseError(context + ": cannot parse '" + s + "' as an integer");
    return v;
}

// Current wall-clock time as UTC ISO-8601, for fit reports (never stored in
// model files, which must be byte-reproducible).
inline std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Locate <name>_TRAIN / <name>_TEST under a UCR-style directory, accepting
// both flat layouts and one-folder-per-dataset layouts, with the usual
// extensions.
inline std::string find_split_file(const std::string& dir, const std::string& name, const std::string& part) {
    namespace fs = std::filesystem;
    const std::string base = name + "_" + part;
    std::vector<std::string> candidates;
    for (const char* ext : {".tsv", ".txt", ".csv", ""}) {
        candidates.push_back((fs::path(dir) / name / (base + ext)).string());
        candidates.push_back((fs::path(dir) / (base + ext)).string());
    }
    for (const auto& c : candidates) {
        std::error_code ec;
        if (fs::is_regular_file(c, ec)) return c;
    }
    throw selfrocket::IOError("no such file: " + (fs::path(dir) / name / (base + ".tsv")).string() +
                              " (also tried the flat layout and .txt/.csv/bare extensions)");
}

} // namespace cli
