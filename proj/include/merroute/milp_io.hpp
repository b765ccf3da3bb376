#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "merroute/errors.hpp"
#include "merroute/milp.hpp"

namespace merroute {

enum class ModelFormat { Lp, Mps };

inline const char* format_extension(ModelFormat f) { return f == ModelFormat::Lp ? "lp" : "mps"; }

namespace detail {

/// Shortest decimal string that parses back to exactly the same double.
inline std::string fmt_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline void append_term(std::string& line, double coeff, const std::string& name, bool first) {
    if (first) {
        if (coeff < 0)
            line += "- ";
        else if (!line.empty())
            line += "";
    } else {
        line += coeff < 0 ? " - " : " + ";
    }
    double mag = std::abs(coeff);
    if (mag != 1.0) {
        line += fmt_double(mag);
        line += " ";
    }
    line += name;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// LP format
// ---------------------------------------------------------------------------

inline void write_model_lp(const MilpModel& model, std::ostream& out) {
    out << (model.objective().sense == ObjectiveSense::Maximize ? "Maximize" : "Minimize") << "\n";
    {
        std::string line = " obj:";
        if (model.objective().terms.empty()) {
            line += " 0 " + model.vars().front().name;
        } else {
            int on_line = 0;
            bool first = true;
            for (const LinTerm& t : model.objective().terms) {
                line += " ";
                detail::append_term(line, t.coeff, model.var(t.var).name, first);
                first = false;
                if (++on_line == 8) {
                    out << line << "\n";
                    line = "     ";
                    on_line = 0;
                }
            }
        }
        if (!line.empty() && line != "     ") out << line << "\n";
    }
    out << "Subject To\n";
    for (const LinConstraint& c : model.constraints()) {
        std::string line = " " + c.name + ":";
        int on_line = 0;
        bool first = true;
        for (const LinTerm& t : c.terms) {
            line += " ";
            detail::append_term(line, t.coeff, model.var(t.var).name, first);
            first = false;
            if (++on_line == 8) {
                out << line << "\n";
                line = "     ";
                on_line = 0;
            }
        }
        const char* sense = c.sense == ConstraintSense::LessEqual      ? "<="
                            : c.sense == ConstraintSense::GreaterEqual ? ">="
                                                                       : "=";
        out << line << " " << sense << " " << detail::fmt_double(c.rhs) << "\n";
    }
    out << "Bounds\n";
    for (const VarInfo& v : model.vars()) {
        if (v.kind == VarKind::Binary) continue;
        if (v.lower == 0.0 && v.upper == kInfinity) continue;  // LP default
        if (v.lower == -kInfinity && v.upper == kInfinity) {
            out << " " << v.name << " free\n";
            continue;
        }
        if (v.lower != 0.0) {
            out << " " << v.name << " >= "
                << (v.lower == -kInfinity ? "-inf" : detail::fmt_double(v.lower)) << "\n";
        }
        if (v.upper != kInfinity) out << " " << v.name << " <= " << detail::fmt_double(v.upper) << "\n";
    }
    bool any_binary = false;
    for (const VarInfo& v : model.vars()) any_binary = any_binary || v.kind == VarKind::Binary;
    if (any_binary) {
        out << "Binaries\n";
        std::string line;
        int on_line = 0;
        for (const VarInfo& v : model.vars()) {
            if (v.kind != VarKind::Binary) continue;
            line += " " + v.name;
            if (++on_line == 6) {
                out << line << "\n";
                line.clear();
                on_line = 0;
            }
        }
        if (!line.empty()) out << line << "\n";
    }
    out << "End\n";
}

// ---------------------------------------------------------------------------
// MPS format (free layout: whitespace-separated fields, standard sections)
// ---------------------------------------------------------------------------

inline void write_model_mps(const MilpModel& model, std::ostream& out) {
    out << "NAME          merroute\n";
    if (model.objective().sense == ObjectiveSense::Maximize) out << "OBJSENSE\n    MAX\n";
    out << "ROWS\n N  obj\n";
    for (const LinConstraint& c : model.constraints()) {
        char sense = c.sense == ConstraintSense::LessEqual      ? 'L'
                     : c.sense == ConstraintSense::GreaterEqual ? 'G'
                                                                : 'E';
        out << " " << sense << "  " << c.name << "\n";
    }

    // Column-major entries: objective first, then constraints in order.
    std::vector<std::vector<std::pair<const std::string*, double>>> columns(model.num_vars());
    for (const LinTerm& t : model.objective().terms)
        columns[t.var.index].emplace_back(nullptr, t.coeff);
    for (const LinConstraint& c : model.constraints())
        for (const LinTerm& t : c.terms) columns[t.var.index].emplace_back(&c.name, t.coeff);

    out << "COLUMNS\n";
    static const std::string obj_name = "obj";
    bool in_integer = false;
    int marker = 0;
    for (std::size_t i = 0; i < model.num_vars(); ++i) {
        const VarInfo& v = model.vars()[i];
        bool want_integer = v.kind == VarKind::Binary;
        if (want_integer != in_integer) {
            out << "    MARKER" << marker++ << "  'MARKER'  " << (want_integer ? "'INTORG'" : "'INTEND'")
                << "\n";
            in_integer = want_integer;
        }
        if (columns[i].empty()) {
            out << "    " << v.name << "  obj  0\n";
            continue;
        }
        for (const auto& [row, coeff] : columns[i]) {
            out << "    " << v.name << "  " << (row ? *row : obj_name) << "  "
                << detail::fmt_double(coeff) << "\n";
        }
    }
    if (in_integer) out << "    MARKER" << marker++ << "  'MARKER'  'INTEND'\n";

    out << "RHS\n";
    for (const LinConstraint& c : model.constraints())
        out << "    RHS  " << c.name << "  " << detail::fmt_double(c.rhs) << "\n";

    out << "BOUNDS\n";
    for (const VarInfo& v : model.vars()) {
        if (v.kind == VarKind::Binary) {
            out << " BV BND  " << v.name << "\n";
            continue;
        }
        if (v.lower == 0.0 && v.upper == kInfinity) continue;  // MPS default
        if (v.lower == -kInfinity && v.upper == kInfinity) {
            out << " FR BND  " << v.name << "\n";
            continue;
        }
        if (v.lower == -kInfinity)
            out << " MI BND  " << v.name << "\n";
        else if (v.lower != 0.0)
            out << " LO BND  " << v.name << "  " << detail::fmt_double(v.lower) << "\n";
        if (v.upper != kInfinity)
            out << " UP BND  " << v.name << "  " << detail::fmt_double(v.upper) << "\n";
    }
    out << "ENDATA\n";
}

/// Writes the model to `path` in the chosen format. Requires a non-empty
/// model (at least one variable and one constraint).
inline void emit_model(const MilpModel& model, ModelFormat format,
                       const std::filesystem::path& path) {
    if (model.num_vars() == 0 || model.num_constraints() == 0)
        throw ModelError("cannot emit an empty model");
    std::ofstream out(path);
    if (!out) throw Error("cannot open model file for writing: " + path.string());
    if (format == ModelFormat::Lp)
        write_model_lp(model, out);
    else
        write_model_mps(model, out);
    out.flush();
    if (!out) throw Error("failed writing model file: " + path.string());
}

// ---------------------------------------------------------------------------
// Readers (round-trip of the dialects written above)
// ---------------------------------------------------------------------------

namespace detail {

struct LpTokenizer {
    std::vector<std::string> tokens;
    std::size_t pos = 0;

    explicit LpTokenizer(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            auto comment = line.find('\\');
            if (comment != std::string::npos) line.erase(comment);
            std::size_t i = 0;
            while (i < line.size()) {
                char ch = line[i];
                if (std::isspace(static_cast<unsigned char>(ch))) {
                    ++i;
                    continue;
                }
                if (ch == '+' || ch == '-' || ch == ':') {
                    tokens.emplace_back(1, ch);
                    ++i;
                    continue;
                }
                if (ch == '<' || ch == '>' || ch == '=') {
                    std::string op(1, ch);
                    if (i + 1 < line.size() && line[i + 1] == '=') {
                        op += '=';
                        ++i;
                    }
                    tokens.push_back(op);
                    ++i;
                    continue;
                }
                std::size_t j = i;
                while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
                       std::string("+-:<>=").find(line[j]) == std::string::npos)
                    ++j;
                // Keep exponent signs attached: "1e-05".
                while (j < line.size() && (line[j] == '+' || line[j] == '-') && j > i &&
                       (line[j - 1] == 'e' || line[j - 1] == 'E') &&
                       std::isdigit(static_cast<unsigned char>(line[i]))) {
                    ++j;
                    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
                }
                tokens.push_back(line.substr(i, j - i));
                i = j;
            }
        }
    }

    bool done() const { return pos >= tokens.size(); }
    const std::string& peek() const { return tokens[pos]; }
    std::string next() { return tokens[pos++]; }
};

inline bool is_number_token(const std::string& t) {
    char* end = nullptr;
    std::strtod(t.c_str(), &end);
    return end && *end == '\0' && end != t.c_str();
}

inline bool iequals(const std::string& a, const char* b) {
    std::size_t i = 0;
    for (; i < a.size() && b[i]; ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return i == a.size() && b[i] == '\0';
}

}  // namespace detail

/// Parses the LP dialect produced by write_model_lp back into a model.
inline MilpModel read_model_lp(std::istream& in) {
    using detail::iequals;
    detail::LpTokenizer tk(in);
    MilpModel model;

    struct RawConstraint {
        std::string name;
        std::vector<std::pair<std::string, double>> terms;
        ConstraintSense sense;
        double rhs;
    };
    std::vector<std::pair<std::string, double>> objective_terms;
    std::vector<RawConstraint> raw;
    ObjectiveSense sense = ObjectiveSense::Minimize;
    std::map<std::string, std::pair<double, double>> bounds;  // overrides
    std::vector<std::string> binaries;
    std::vector<std::string> var_order;
    std::map<std::string, bool> seen;

    auto note_var = [&](const std::string& name) {
        if (!seen[name]) {
            seen[name] = true;
            var_order.push_back(name);
        }
    };

    auto is_section_keyword = [&](const std::string& t) {
        return iequals(t, "subject") || iequals(t, "st") || iequals(t, "s.t.") ||
               iequals(t, "bounds") || iequals(t, "binaries") || iequals(t, "binary") ||
               iequals(t, "bin") || iequals(t, "generals") || iequals(t, "general") ||
               iequals(t, "end");
    };

    if (tk.done()) throw ParseError("LP: empty file");
    {
        std::string head = tk.next();
        if (iequals(head, "maximize") || iequals(head, "max"))
            sense = ObjectiveSense::Maximize;
        else if (iequals(head, "minimize") || iequals(head, "min"))
            sense = ObjectiveSense::Minimize;
        else
            throw ParseError("LP: expected Maximize/Minimize, got " + head);
    }

    enum class Section { Objective, Constraints, Bounds, Binaries, Generals, Done };
    Section section = Section::Objective;

    // Consumes a section keyword (already peeked) and switches state.
    auto consume_section = [&]() {
        std::string t = tk.next();
        if (iequals(t, "subject")) {
            if (!tk.done() && iequals(tk.peek(), "to")) tk.next();
            section = Section::Constraints;
        } else if (iequals(t, "st") || iequals(t, "s.t.")) {
            section = Section::Constraints;
        } else if (iequals(t, "bounds")) {
            section = Section::Bounds;
        } else if (iequals(t, "binaries") || iequals(t, "binary") || iequals(t, "bin")) {
            section = Section::Binaries;
        } else if (iequals(t, "generals") || iequals(t, "general")) {
            section = Section::Generals;
        } else {
            section = Section::Done;
        }
    };

    // expression := [label ':'] {('+'|'-')? [number] name}* [sense rhs]
    // Stops (without consuming) at a section keyword.
    auto parse_expression = [&](std::vector<std::pair<std::string, double>>& terms,
                                std::string* label) -> std::pair<int, double> {
        if (label && tk.pos + 1 < tk.tokens.size() && tk.tokens[tk.pos + 1] == ":") {
            *label = tk.next();
            tk.next();  // ':'
        }
        while (!tk.done()) {
            const std::string& t = tk.peek();
            if (is_section_keyword(t)) break;
            if (t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">") {
                std::string op = tk.next();
                if (tk.done()) throw ParseError("LP: missing rhs after " + op);
                std::string rhs_tok = tk.next();
                double rhs_sign = 1.0;
                if (rhs_tok == "-") {
                    rhs_sign = -1.0;
                    rhs_tok = tk.next();
                } else if (rhs_tok == "+") {
                    rhs_tok = tk.next();
                }
                if (!detail::is_number_token(rhs_tok)) throw ParseError("LP: bad rhs " + rhs_tok);
                int s = (op == "<=" || op == "<") ? 0 : (op == ">=" || op == ">") ? 1 : 2;
                return {s, rhs_sign * std::strtod(rhs_tok.c_str(), nullptr)};
            }
            double sign = 1.0;
            if (t == "+" || t == "-") {
                sign = t == "-" ? -1.0 : 1.0;
                tk.next();
            } else if (!terms.empty()) {
                break;  // next labeled statement starts
            }
            if (tk.done()) throw ParseError("LP: dangling sign");
            std::string tok = tk.next();
            double coeff = 1.0;
            if (detail::is_number_token(tok)) {
                coeff = std::strtod(tok.c_str(), nullptr);
                if (tk.done() || is_section_keyword(tk.peek()) || tk.peek() == "+" ||
                    tk.peek() == "-" || tk.peek() == "<=" || tk.peek() == ">=" || tk.peek() == "=") {
                    terms.emplace_back("", sign * coeff);  // constant; dropped later
                    continue;
                }
                tok = tk.next();
            }
            terms.emplace_back(tok, sign * coeff);
        }
        return {-1, 0.0};
    };

    // Objective: a single labeled expression.
    {
        std::vector<std::pair<std::string, double>> terms;
        std::string label;
        parse_expression(terms, &label);
        for (auto& [name, coeff] : terms)
            if (!name.empty()) objective_terms.emplace_back(name, coeff);
        if (tk.done()) throw ParseError("LP: missing constraint section");
        consume_section();
    }

    while (section == Section::Constraints && !tk.done()) {
        if (is_section_keyword(tk.peek())) {
            consume_section();
            break;
        }
        RawConstraint c;
        auto [s, rhs] = parse_expression(c.terms, &c.name);
        if (s < 0) throw ParseError("LP: constraint " + c.name + " missing sense");
        c.sense = s == 0   ? ConstraintSense::LessEqual
                  : s == 1 ? ConstraintSense::GreaterEqual
                           : ConstraintSense::Equal;
        c.rhs = rhs;
        std::erase_if(c.terms, [](const auto& p) { return p.first.empty(); });
        raw.push_back(std::move(c));
    }

    while (section == Section::Bounds && !tk.done()) {
        if (is_section_keyword(tk.peek())) {
            consume_section();
            break;
        }
        std::string first = tk.next();
        if (tk.done()) throw ParseError("LP: truncated bounds entry");
        if (iequals(tk.peek(), "free")) {
            tk.next();
            bounds[first] = {-kInfinity, kInfinity};
            note_var(first);
            continue;
        }
        std::string op = tk.next();
        if (tk.done()) throw ParseError("LP: truncated bounds entry");
        std::string value_tok = tk.next();
        double sign = 1.0;
        if (value_tok == "-") {
            sign = -1.0;
            value_tok = tk.next();
        } else if (value_tok == "+") {
            value_tok = tk.next();
        }
        double value;
        if (iequals(value_tok, "inf") || iequals(value_tok, "+inf"))
            value = sign * kInfinity;
        else if (iequals(value_tok, "-inf"))
            value = -kInfinity;
        else
            value = std::strtod(value_tok.c_str(), nullptr) * sign;
        auto [it, inserted] = bounds.try_emplace(first, 0.0, kInfinity);
        if (op == ">=")
            it->second.first = value;
        else if (op == "<=")
            it->second.second = value;
        else
            throw ParseError("LP: unsupported bound operator " + op);
        note_var(first);
    }

    while ((section == Section::Binaries || section == Section::Generals) && !tk.done()) {
        if (is_section_keyword(tk.peek())) {
            consume_section();
            continue;
        }
        if (section == Section::Binaries)
            binaries.push_back(tk.next());
        else
            tk.next();  // integers with general bounds are not produced by the writer
    }

    // Register variables in first-appearance order (objective, constraints,
    // bounds, binaries) to keep the reader deterministic.
    std::vector<std::string> appearance;
    std::map<std::string, bool> listed;
    auto add_name = [&](const std::string& n) {
        if (!listed[n]) {
            listed[n] = true;
            appearance.push_back(n);
        }
    };
    for (const auto& [n, c] : objective_terms) add_name(n);
    for (const RawConstraint& c : raw)
        for (const auto& [n, coeff] : c.terms) add_name(n);
    for (const auto& n : var_order) add_name(n);
    for (const auto& n : binaries) add_name(n);

    std::map<std::string, bool> is_binary;
    for (const std::string& b : binaries) is_binary[b] = true;
    for (const std::string& name : appearance) {
        if (is_binary[name]) {
            model.add_binary(name);
        } else {
            auto it = bounds.find(name);
            double lo = it != bounds.end() ? it->second.first : 0.0;
            double hi = it != bounds.end() ? it->second.second : kInfinity;
            model.add_continuous(name, lo, hi);
        }
    }
    std::vector<LinTerm> obj;
    for (const auto& [n, c] : objective_terms) obj.push_back({c, model.find_var(n)});
    model.set_objective(sense, std::move(obj));
    for (const RawConstraint& c : raw) {
        std::vector<LinTerm> terms;
        for (const auto& [n, coeff] : c.terms) terms.push_back({coeff, model.find_var(n)});
        model.add_constraint(c.name, std::move(terms), c.sense, c.rhs);
    }
    return model;
}

/// Parses the free-layout MPS dialect produced by write_model_mps.
inline MilpModel read_model_mps(std::istream& in) {
    MilpModel model;
    std::string line;
    enum class Section { None, Rows, Columns, Rhs, Ranges, Bounds, Done };
    Section section = Section::None;
    ObjectiveSense sense = ObjectiveSense::Minimize;
    bool expect_objsense_value = false;

    struct RawRow {
        char type;
        std::string name;
    };
    std::vector<RawRow> rows;
    std::string objective_row;
    // Column entries in file order.
    struct Entry {
        std::string column;
        std::string row;
        double value;
        bool integer;
    };
    std::vector<Entry> entries;
    std::vector<std::string> column_order;
    std::map<std::string, bool> column_seen;
    std::map<std::string, bool> column_integer;
    std::map<std::string, double> rhs;
    std::map<std::string, std::pair<double, double>> bounds;
    std::map<std::string, bool> has_bounds;
    bool in_integer = false;

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream iss(s);
        std::string tok;
        while (iss >> tok) out.push_back(tok);
        return out;
    };

    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '*') continue;
        bool indented = line[0] == ' ' || line[0] == '\t';
        std::vector<std::string> f = split(line);
        if (f.empty()) continue;

        if (!indented) {
            const std::string& head = f[0];
            if (head == "NAME") continue;
            if (head == "OBJSENSE") {
                if (f.size() > 1) {
                    sense = f[1] == "MAX" || f[1] == "MAXIMIZE" ? ObjectiveSense::Maximize
                                                                : ObjectiveSense::Minimize;
                } else {
                    expect_objsense_value = true;
                }
                continue;
            }
            if (head == "ROWS") { section = Section::Rows; continue; }
            if (head == "COLUMNS") { section = Section::Columns; continue; }
            if (head == "RHS") { section = Section::Rhs; continue; }
            if (head == "RANGES") { section = Section::Ranges; continue; }
            if (head == "BOUNDS") { section = Section::Bounds; continue; }
            if (head == "ENDATA") { section = Section::Done; break; }
            throw ParseError("MPS: unknown section " + head);
        }

        if (expect_objsense_value) {
            sense = f[0] == "MAX" || f[0] == "MAXIMIZE" ? ObjectiveSense::Maximize
                                                        : ObjectiveSense::Minimize;
            expect_objsense_value = false;
            continue;
        }

        switch (section) {
            case Section::Rows: {
                if (f.size() < 2) throw ParseError("MPS: bad ROWS line: " + line);
                if (f[0] == "N") {
                    if (objective_row.empty()) objective_row = f[1];
                } else {
                    rows.push_back({f[0][0], f[1]});
                }
                break;
            }
            case Section::Columns: {
                if (f.size() >= 3 && f[1] == "'MARKER'") {
                    in_integer = f[2] == "'INTORG'";
                    break;
                }
                if (f.size() < 3) throw ParseError("MPS: bad COLUMNS line: " + line);
                const std::string& col = f[0];
                if (!column_seen[col]) {
                    column_seen[col] = true;
                    column_order.push_back(col);
                    column_integer[col] = in_integer;
                }
                for (std::size_t i = 1; i + 1 < f.size(); i += 2)
                    entries.push_back({col, f[i], std::strtod(f[i + 1].c_str(), nullptr), in_integer});
                break;
            }
            case Section::Rhs: {
                for (std::size_t i = 1; i + 1 < f.size(); i += 2)
                    rhs[f[i]] = std::strtod(f[i + 1].c_str(), nullptr);
                break;
            }
            case Section::Ranges:
                throw ParseError("MPS: RANGES section not supported");
            case Section::Bounds: {
                if (f.size() < 3) throw ParseError("MPS: bad BOUNDS line: " + line);
                const std::string& kind = f[0];
                const std::string& col = f[2];
                if (!column_seen[col]) {
                    column_seen[col] = true;
                    column_order.push_back(col);
                    column_integer[col] = false;
                }
                auto [it, inserted] = bounds.try_emplace(col, 0.0, kInfinity);
                if (kind == "BV") {
                    it->second = {0.0, 1.0};
                    column_integer[col] = true;
                } else if (kind == "FR") {
                    it->second = {-kInfinity, kInfinity};
                } else if (kind == "MI") {
                    it->second.first = -kInfinity;
                } else if (kind == "LO") {
                    it->second.first = std::strtod(f[3].c_str(), nullptr);
                } else if (kind == "UP") {
                    it->second.second = std::strtod(f[3].c_str(), nullptr);
                } else if (kind == "FX") {
                    double v = std::strtod(f[3].c_str(), nullptr);
                    it->second = {v, v};
                } else {
                    throw ParseError("MPS: unsupported bound type " + kind);
                }
                has_bounds[col] = true;
                break;
            }
            default:
                throw ParseError("MPS: data before any section: " + line);
        }
    }

    for (const std::string& col : column_order) {
        if (column_integer[col]) {
            model.add_binary(col);
        } else {
            auto it = bounds.find(col);
            double lo = it != bounds.end() ? it->second.first : 0.0;
            double hi = it != bounds.end() ? it->second.second : kInfinity;
            model.add_continuous(col, lo, hi);
        }
    }

    std::map<std::string, std::vector<LinTerm>> row_terms;
    std::vector<LinTerm> obj_terms;
    for (const Entry& e : entries) {
        VarRef ref = model.find_var(e.column);
        if (e.row == objective_row)
            obj_terms.push_back({e.value, ref});
        else
            row_terms[e.row].push_back({e.value, ref});
    }
    model.set_objective(sense, std::move(obj_terms));
    for (const RawRow& r : rows) {
        ConstraintSense s = r.type == 'L'   ? ConstraintSense::LessEqual
                            : r.type == 'G' ? ConstraintSense::GreaterEqual
                                            : ConstraintSense::Equal;
        auto it = row_terms.find(r.name);
        std::vector<LinTerm> terms = it != row_terms.end() ? it->second : std::vector<LinTerm>{};
        double b = rhs.contains(r.name) ? rhs[r.name] : 0.0;
        model.add_constraint(r.name, std::move(terms), s, b);
    }
    return model;
}

inline MilpModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path.string());
    std::string ext = path.extension().string();
    if (ext == ".lp") return read_model_lp(in);
    if (ext == ".mps") return read_model_mps(in);
    throw ParseError("unknown model format: " + path.string());
}

// ---------------------------------------------------------------------------
// Solution files
// ---------------------------------------------------------------------------

/// Line format consumed from external solvers:
///   =status= optimal|infeasible|gap-limit|time-limit
///   =obj= <value>        (optional)
///   =gap= <value>        (optional)
///   <variable-name> <value>
/// Variables absent from the file default to 0.
inline Solution read_solution_file(const std::filesystem::path& path, const MilpModel& model) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open solution file: " + path.string());
    Solution sol;
    sol.values.assign(model.num_vars(), 0.0);
    bool have_status = false;
    bool have_obj = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream iss(line);
        std::string key;
        iss >> key;
        if (key.empty()) continue;
        if (key == "=status=") {
            std::string status;
            iss >> status;
            if (status == "optimal")
                sol.status = SolveStatus::Optimal;
            else if (status == "infeasible")
                sol.status = SolveStatus::Infeasible;
            else if (status == "gap-limit")
                sol.status = SolveStatus::GapLimit;
            else if (status == "time-limit")
                sol.status = SolveStatus::TimeLimit;
            else
                throw ParseError("solution file: unknown status " + status);
            have_status = true;
            continue;
        }
        if (key == "=obj=") {
            iss >> sol.objective_value;
            have_obj = true;
            continue;
        }
        if (key == "=gap=") {
            iss >> sol.gap;
            continue;
        }
        double value = 0.0;
        if (!(iss >> value)) throw ParseError("solution file: bad line: " + line);
        VarRef ref = model.find_var(key);
        if (ref.valid()) sol.values[ref.index] = value;
    }
    if (!have_status) throw ParseError("solution file: missing =status= line");
    if ((sol.status == SolveStatus::Optimal || sol.status == SolveStatus::GapLimit) && !have_obj)
        sol.objective_value = evaluate_objective(model.objective(), sol.values);
    return sol;
}

/// Machine output: one `var,value` row per variable, in registry order.
inline void write_solution_csv(const Solution& sol, const MilpModel& model,
                               const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open solution csv for writing: " + path.string());
    out << "var,value\n";
    for (std::size_t i = 0; i < model.num_vars(); ++i)
        out << model.vars()[i].name << "," << detail::fmt_double(i < sol.values.size() ? sol.values[i] : 0.0)
            << "\n";
}

/// Reads either the solver line format or the solution.csv written above.
inline Solution read_solution_any(const std::filesystem::path& path, const MilpModel& model,
                                  SolveStatus assumed_status = SolveStatus::Optimal) {
    std::ifstream probe(path);
    if (!probe) throw ParseError("cannot open solution file: " + path.string());
    std::string first;
    std::getline(probe, first);
    probe.close();
    if (first.rfind("var,value", 0) == 0) {
        std::ifstream in(path);
        Solution sol;
        sol.status = assumed_status;
        sol.values.assign(model.num_vars(), 0.0);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto comma = line.find(',');
            if (comma == std::string::npos) throw ParseError("solution csv: bad line: " + line);
            std::string name = line.substr(0, comma);
            double value = std::strtod(line.c_str() + comma + 1, nullptr);
            VarRef ref = model.find_var(name);
            if (ref.valid()) sol.values[ref.index] = value;
        }
        sol.objective_value = evaluate_objective(model.objective(), sol.values);
        return sol;
    }
    return read_solution_file(path, model);
}

}  // namespace merroute
