//---------------------------------------------------------------------------//
//! \file bfp/config.hpp
//! Line-oriented key=value run configuration.
//---------------------------------------------------------------------------//
#pragma once

#include <charconv>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "errors.hpp"
#include "solvers.hpp"

namespace bfp
{
//---------------------------------------------------------------------------//
//! Malformed or invalid configuration text.
class ConfigError : public Error
{
  public:
    ConfigError(std::string const& what, int line, std::string key)
        : Error(what), line_(line), key_(std::move(key))
    {
    }

    //! 1-based line number, or 0 for whole-config validation errors.
    int line() const noexcept { return line_; }
    std::string const& key() const noexcept { return key_; }

  private:
    int line_;
    std::string key_;
};

enum class RunMethod
{
    si,
    nda,
    both,
    oracle
};

inline char const* to_string(RunMethod m)
{
    switch (m)
    {
        case RunMethod::si:
            return "si";
        case RunMethod::nda:
            return "nda";
        case RunMethod::both:
            return "both";
        case RunMethod::oracle:
            return "oracle";
    }
    return "?";
}

enum class KernelKind
{
    hgk,
    srk
};

//---------------------------------------------------------------------------//
/*!
 * One run: the problem plus what to execute and where to write.
 */
struct RunConfig
{
    KernelKind kernel{KernelKind::hgk};
    double sigma_s{1.0};
    double g{0.9};
    double c{0.3903};
    double eta{2.836e-5};
    bool normalize{true};
    int smooth_moments{1};
    int decomposition_order{15};
    bool transport_corrected{true};
    double sigma_a{1e-6};
    double length_cm{1.0};
    int cells{200};
    int quad_order{16};
    double source_q{1.0};
    double tol{1e-6};
    int max_iters{10000};
    RunMethod method{RunMethod::both};
    std::string label{"case"};
    std::string output_dir{"."};
    bool emit_flux{true};
    bool emit_history{true};

    bool operator==(RunConfig const&) const = default;

    ProblemSpec problem() const
    {
        ProblemSpec p;
        p.length_cm = length_cm;
        p.cells = cells;
        p.quad_order = quad_order;
        if (kernel == KernelKind::hgk)
            p.kernel = HgkKernel{sigma_s, g};
        else
            p.kernel = SrkKernel{sigma_s, c, eta, normalize};
        p.smooth_moments = smooth_moments;
        p.decomposition_order = decomposition_order;
        p.transport_corrected = transport_corrected;
        p.sigma_a = sigma_a;
        p.source_q = source_q;
        p.tol = tol;
        p.max_iters = max_iters;
        return p;
    }
};

namespace detail
{
inline std::string_view trim(std::string_view s)
{
    auto const ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

template<class T>
T parse_number(std::string_view v, int line, std::string const& key)
{
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
    {
        throw ConfigError("line " + std::to_string(line) + ": cannot parse '"
                              + std::string(v) + "' for key " + key,
                          line,
                          key);
    }
    return out;
}

inline bool parse_bool(std::string_view v, int line, std::string const& key)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError("line " + std::to_string(line) + ": expected boolean for "
                          + key,
                      line,
                      key);
}

[[noreturn]] inline void invalid(std::string const& key, std::string const& why)
{
    throw ConfigError("invalid " + key + ": " + why, 0, key);
}
}  // namespace detail

//---------------------------------------------------------------------------//
//! Check value ranges; throws ConfigError naming the offending key.
inline void validate(RunConfig const& c)
{
    if (!(c.sigma_s >= 0))
        detail::invalid("sigma_s", "must be nonnegative");
    if (!(c.g >= 0 && c.g < 1))
        detail::invalid("g", "HGK anisotropy must lie in [0, 1)");
    if (!(c.c > 0))
        detail::invalid("C", "must be positive");
    if (!(c.eta > 0))
        detail::invalid("eta", "must be positive");
    if (c.smooth_moments < 1)
        detail::invalid("B", "must be >= 1");
    if (c.decomposition_order != 0
        && c.decomposition_order < c.smooth_moments + 1)
    {
        detail::invalid("decomposition_order", "must be 0 or >= B + 1");
    }
    if (!(c.sigma_a >= 0))
        detail::invalid("sigma_a", "must be nonnegative");
    if (!(c.length_cm > 0))
        detail::invalid("length_cm", "must be positive");
    if (c.cells < 1)
        detail::invalid("cells", "must be >= 1");
    if (c.quad_order < 2 || c.quad_order % 2 != 0)
        detail::invalid("quad_order", "must be even and >= 2");
    if (!(c.source_q >= 0))
        detail::invalid("source_q", "must be nonnegative");
    if (!(c.tol > 0))
        detail::invalid("tol", "must be positive");
    if (c.max_iters < 1)
        detail::invalid("max_iters", "must be >= 1");
    if (c.label.empty())
        detail::invalid("label", "must not be empty");
}

/*!
 * Parse key=value text. '#' starts a comment; blank lines are ignored.
 * Unspecified keys keep their defaults.
 */
inline RunConfig parse_config(std::string_view text)
{
    RunConfig cfg;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
        {
            throw ConfigError("line " + std::to_string(line_no)
                                  + ": expected key=value",
                              line_no,
                              "");
        }
        std::string const key(detail::trim(line.substr(0, eq)));
        auto const val = detail::trim(line.substr(eq + 1));

        auto num = [&]<class T>(T& dst) {
            dst = detail::parse_number<T>(val, line_no, key);
        };
        if (key == "kernel")
        {
            if (val == "hgk")
                cfg.kernel = KernelKind::hgk;
            else if (val == "srk")
                cfg.kernel = KernelKind::srk;
            else
                throw ConfigError("line " + std::to_string(line_no)
                                      + ": kernel must be hgk or srk",
                                  line_no,
                                  key);
        }
        else if (key == "method")
        {
            if (val == "si")
                cfg.method = RunMethod::si;
            else if (val == "nda")
                cfg.method = RunMethod::nda;
            else if (val == "both")
                cfg.method = RunMethod::both;
            else if (val == "oracle")
                cfg.method = RunMethod::oracle;
            else
                throw ConfigError("line " + std::to_string(line_no)
                                      + ": method must be si|nda|both|oracle",
                                  line_no,
                                  key);
        }
        else if (key == "sigma_s")
            num(cfg.sigma_s);
        else if (key == "g")
            num(cfg.g);
        else if (key == "C")
            num(cfg.c);
        else if (key == "eta")
            num(cfg.eta);
        else if (key == "normalize")
            cfg.normalize = detail::parse_bool(val, line_no, key);
        else if (key == "B")
            num(cfg.smooth_moments);
        else if (key == "decomposition_order")
            num(cfg.decomposition_order);
        else if (key == "transport_corrected")
            cfg.transport_corrected = detail::parse_bool(val, line_no, key);
        else if (key == "sigma_a")
            num(cfg.sigma_a);
        else if (key == "length_cm")
            num(cfg.length_cm);
        else if (key == "cells")
            num(cfg.cells);
        else if (key == "quad_order")
            num(cfg.quad_order);
        else if (key == "source_q")
            num(cfg.source_q);
        else if (key == "tol")
            num(cfg.tol);
        else if (key == "max_iters")
            num(cfg.max_iters);
        else if (key == "label")
            cfg.label = std::string(val);
        else if (key == "output_dir")
            cfg.output_dir = std::string(val);
        else if (key == "emit_flux")
            cfg.emit_flux = detail::parse_bool(val, line_no, key);
        else if (key == "emit_history")
            cfg.emit_history = detail::parse_bool(val, line_no, key);
        else
        {
            throw ConfigError("line " + std::to_string(line_no)
                                  + ": unknown key '" + key + "'",
                              line_no,
                              key);
        }
    }
    validate(cfg);
    return cfg;
}

//! Write every key at full precision; parse_config reads it back exactly.
inline std::string serialize_config(RunConfig const& c)
{
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    auto b = [](bool v) { return v ? "true" : "false"; };
    os << "kernel=" << (c.kernel == KernelKind::hgk ? "hgk" : "srk") << '\n'
       << "sigma_s=" << c.sigma_s << '\n'
       << "g=" << c.g << '\n'
       << "C=" << c.c << '\n'
       << "eta=" << c.eta << '\n'
       << "normalize=" << b(c.normalize) << '\n'
       << "B=" << c.smooth_moments << '\n'
       << "decomposition_order=" << c.decomposition_order << '\n'
       << "transport_corrected=" << b(c.transport_corrected) << '\n'
       << "sigma_a=" << c.sigma_a << '\n'
       << "length_cm=" << c.length_cm << '\n'
       << "cells=" << c.cells << '\n'
       << "quad_order=" << c.quad_order << '\n'
       << "source_q=" << c.source_q << '\n'
       << "tol=" << c.tol << '\n'
       << "max_iters=" << c.max_iters << '\n'
       << "method=" << to_string(c.method) << '\n'
       << "label=" << c.label << '\n'
       << "output_dir=" << c.output_dir << '\n'
       << "emit_flux=" << b(c.emit_flux) << '\n'
       << "emit_history=" << b(c.emit_history) << '\n';
    return os.str();
}

//---------------------------------------------------------------------------//
}  // namespace bfp
