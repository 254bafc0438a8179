#pragma once

#include <stdexcept>
#include <string>

namespace madc {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated a documented precondition (bad sizes, bad ranges, ...).
struct param_error : error {
    explicit param_error(const std::string& what) : error(what) {}
};

// Index or subset outside the ground set it must live in.
struct out_of_range_error : param_error {
    explicit out_of_range_error(const std::string& what) : param_error(what) {}
};

// Malformed textual input (array files, CSV-ish option strings).
struct parse_error : error {
    int line;
    parse_error(int line_, const std::string& what)
        : error("parse error at line " + std::to_string(line_) + ": " + what), line(line_) {}
};

// Array verification failures carry a witness so callers can print it.
struct pda_violation : error {
    explicit pda_violation(const std::string& what) : error(what) {}
};

struct a1_violation : pda_violation {
    int column, stars, expected;
    a1_violation(int column_, int stars_, int expected_)
        : pda_violation("A1 violated: column " + std::to_string(column_) + " has " +
                        std::to_string(stars_) + " stars, expected " + std::to_string(expected_)),
          column(column_), stars(stars_), expected(expected_) {}
};

struct a2_violation : pda_violation {
    int label;
    a2_violation(int label_, const std::string& what) : pda_violation(what), label(label_) {}
};

struct a3_violation : pda_violation {
    int label;
    int row1, col1, row2, col2;
    a3_violation(int label_, int r1, int c1, int r2, int c2, const std::string& reason)
        : pda_violation("A3 violated: label " + std::to_string(label_) + " at (" +
                        std::to_string(r1) + "," + std::to_string(c1) + ") and (" +
                        std::to_string(r2) + "," + std::to_string(c2) + "): " + reason),
          label(label_), row1(r1), col1(c1), row2(r2), col2(c2) {}
};

// Arithmetic left the exactly-representable range.
struct overflow_error : error {
    explicit overflow_error(const std::string& what) : error(what) {}
};

// Packet splitting needs eta*beta to divide evenly among K-1 shares.
struct divisibility_error : param_error {
    explicit divisibility_error(const std::string& what) : param_error(what) {}
};

// Protocol-level failures.
struct protocol_error : error {
    explicit protocol_error(const std::string& what) : error(what) {}
};

// A sender would need a batch it cannot read to form a transmission.
struct infeasible_transmission : protocol_error {
    int sender, label;
    infeasible_transmission(int sender_, int label_, const std::string& detail)
        : protocol_error("infeasible transmission from reducer " + std::to_string(sender_) +
                         " for label " + std::to_string(label_) + ": " + detail),
          sender(sender_), label(label_) {}
};

// A receiver could not cancel interference or recovered wrong bits.
struct decode_failure : protocol_error {
    int reducer;
    decode_failure(int reducer_, const std::string& detail)
        : protocol_error("decode failure at reducer " + std::to_string(reducer_) + ": " + detail),
          reducer(reducer_) {}
};

// The reduce step was handed fewer intermediate values than it needs.
struct incomplete_input : protocol_error {
    explicit incomplete_input(const std::string& what) : protocol_error(what) {}
};

// An exact distribution check found a nonzero gap.
struct privacy_violation : error {
    int demand1 = 0, demand2 = 0;
    explicit privacy_violation(const std::string& what) : error(what) {}
    privacy_violation(int d1, int d2, const std::string& tv)
        : error("privacy violation: query laws for demands " + std::to_string(d1) + " and " +
                std::to_string(d2) + " differ, tv = " + tv),
          demand1(d1), demand2(d2) {}
};

}  // namespace madc
