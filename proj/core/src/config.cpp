#include "stabcert/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "stabcert/errors.hpp"

namespace stabcert {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view value, int line, int col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(value), &used);
        while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used])))
            ++used;
        if (used != value.size()) throw ParseError("trailing junk after number", line, col);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + std::string(value) + "'", line, col);
    }
}

TimeFunction parse_function(std::string_view value, int line, int col) {
    try {
        return TimeFunction::parse(value);
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()), line, col + e.column() - 1);
    }
}

TailAssertion parse_tail(std::string_view value, int line, int col) {
    if (value == "none") return TailAssertion::none;
    if (value == "alpha_integrable") return TailAssertion::alpha_integrable;
    if (value == "beta_integrable") return TailAssertion::beta_integrable;
    if (value == "gamma_sup_attained") return TailAssertion::gamma_sup_attained;
    throw ParseError("unknown tail assertion '" + std::string(value) + "'", line, col);
}

}  // namespace

LoadedConfig load_config(std::string_view text) {
    LoadedConfig out;
    ProblemSpec& spec = out.spec;
    bool have_gamma = false, have_alpha = false, have_beta = false, have_p = false,
         have_g0 = false;

    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::size_t hash = raw.find('#');
        if (hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header", line_no, 1);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "profile" && section != "problem" && section != "numerics")
                throw ParseError("unknown section [" + section + "]", line_no, 1);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", line_no, 1);
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const int vcol = static_cast<int>(raw.find(value.empty() ? "=" : value) + 1);
        if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no, vcol);

        if (section == "profile") {
            if (key == "gamma") {
                spec.profile.gamma = parse_function(value, line_no, vcol);
                have_gamma = true;
            } else if (key == "alpha") {
                spec.profile.alpha = parse_function(value, line_no, vcol);
                have_alpha = true;
            } else if (key == "beta") {
                spec.profile.beta = parse_function(value, line_no, vcol);
                have_beta = true;
            } else if (key == "p") {
                spec.profile.p = parse_number(value, line_no, vcol);
                have_p = true;
            } else {
                throw ParseError("unknown key '" + key + "' in [profile]", line_no, 1);
            }
        } else if (section == "problem") {
            if (key == "g0") {
                spec.g0 = parse_number(value, line_no, vcol);
                have_g0 = true;
            } else if (key == "horizon") {
                spec.horizon = parse_number(value, line_no, vcol);
            } else if (key == "tail") {
                spec.tail = parse_tail(value, line_no, vcol);
            } else if (key == "eps") {
                out.eps = parse_number(value, line_no, vcol);
            } else {
                throw ParseError("unknown key '" + key + "' in [problem]", line_no, 1);
            }
        } else if (section == "numerics") {
            if (key == "quad_tol") {
                spec.numerics.quad_tol = parse_number(value, line_no, vcol);
            } else if (key == "grid_points") {
                spec.numerics.grid_points =
                    static_cast<int>(parse_number(value, line_no, vcol));
            } else {
                throw ParseError("unknown key '" + key + "' in [numerics]", line_no, 1);
            }
        } else {
            throw ParseError("key outside any section", line_no, 1);
        }
    }

    if (!have_gamma || !have_alpha || !have_beta || !have_p)
        throw ValidationError("[profile] must set gamma, alpha, beta, and p");
    if (!have_g0) throw ValidationError("[problem] must set g0");
    if (!(out.eps > 0.0)) throw ValidationError("eps must be > 0");
    validate(spec);
    return out;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

ProblemSpec load_profile(std::string_view config_text) {
    return load_config(config_text).spec;
}

}  // namespace stabcert
