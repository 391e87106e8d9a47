#include "qslice/report.hpp"

#include <charconv>
#include <set>
#include <sstream>

namespace qslice {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double rational_to_double(const Rational& r) { return r.convert_to<double>(); }

std::string num_str(const Rational& r) { return boost::multiprecision::numerator(r).str(); }
std::string den_str(const Rational& r) { return boost::multiprecision::denominator(r).str(); }

}  // namespace

Json variety_json(const VarietySpec& spec) {
    Json j;
    j["p"] = spec.p;
    j["e"] = spec.e;
    j["n"] = spec.n;
    j["m"] = spec.m;
    j["d"] = spec.d;
    j["forms"] = spec.form_texts;
    return j;
}

Json rational_json(const Rational& r) {
    Json j;
    j["num"] = num_str(r);
    j["den"] = den_str(r);
    j["approx"] = rational_to_double(r);
    return j;
}

Json histogram_json(const IntersectionHistogram& hist, int d) {
    Json level;
    level["N"] = hist.N;
    level["mode"] = hist.mode;
    level["total"] = hist.total.str();
    Json counts(Json::value_t::object);
    for (const auto& [k, c] : hist.counts) counts[std::to_string(k)] = c.str();
    level["counts"] = counts;
    level["contained"] = hist.contained.str();
    std::set<std::uint64_t> pkeys;
    for (int k = 0; k <= d; ++k) pkeys.insert(static_cast<std::uint64_t>(k));
    for (const auto& [k, c] : hist.counts) pkeys.insert(k);
    Json p(Json::value_t::object);
    for (auto k : pkeys) p[std::to_string(k)] = rational_json(hist.probability(k));
    level["p"] = p;
    if (hist.mode == "mc") {
        level["samples"] = hist.samples;
        Json se(Json::value_t::object);
        for (const auto& [k, v] : hist.stderr_by_k) se[std::to_string(k)] = v;
        level["se"] = se;
    }
    return level;
}

Json levels_report_json(const VarietySpec& spec, const std::vector<ConvergenceRow>& rows,
                        const std::vector<Rational>& limit) {
    Json j;
    j["variety"] = variety_json(spec);
    Json levels(Json::value_t::array);
    for (const auto& row : rows) {
        Json level = histogram_json(row.hist, spec.d);
        level["deviation"] = rational_to_double(row.deviation);
        levels.push_back(level);
    }
    j["levels"] = levels;
    Json lim(Json::value_t::object);
    for (std::size_t k = 0; k < limit.size(); ++k) lim[std::to_string(k)] = rational_json(limit[k]);
    j["limit"] = lim;
    return j;
}

std::string levels_report_csv(const VarietySpec& spec, const std::vector<ConvergenceRow>& rows,
                              const std::vector<Rational>& limit) {
    std::ostringstream os;
    os << "N,q_N,mode,total,contained,k,count,p_num,p_den,p_approx,deviation,se\n";
    BigInt q = BigInt(spec.p);
    q = boost::multiprecision::pow(q, spec.e);
    for (const auto& row : rows) {
        const auto& hist = row.hist;
        BigInt qN = boost::multiprecision::pow(q, hist.N);
        std::set<std::uint64_t> keys;
        for (int k = 0; k <= spec.d; ++k) keys.insert(static_cast<std::uint64_t>(k));
        for (const auto& [k, c] : hist.counts) keys.insert(k);
        for (auto k : keys) {
            BigInt count = 0;
            auto it = hist.counts.find(k);
            if (it != hist.counts.end()) count = it->second;
            Rational p = hist.probability(k);
            os << hist.N << ',' << qN.str() << ',' << hist.mode << ',' << hist.total.str() << ','
               << hist.contained.str() << ',' << k << ',' << count.str() << ',' << num_str(p) << ','
               << den_str(p) << ',' << fmt_double(rational_to_double(p)) << ','
               << fmt_double(rational_to_double(row.deviation)) << ',';
            auto se = hist.stderr_by_k.find(k);
            if (se != hist.stderr_by_k.end()) os << fmt_double(se->second);
            os << '\n';
        }
    }
    for (std::size_t k = 0; k < limit.size(); ++k) {
        os << "limit,,,,," << k << ",," << num_str(limit[k]) << ',' << den_str(limit[k]) << ','
           << fmt_double(rational_to_double(limit[k])) << ",,\n";
    }
    return os.str();
}

Json formula_json(int d, int e) {
    Json j;
    j["d"] = d;
    j["e"] = e;
    Json lim(Json::value_t::object);
    for (int k = 0; k <= d * e; ++k)
        lim[std::to_string(k)] = rational_json(closed_form_conjecture(d, e, k));
    j["limit"] = lim;
    return j;
}

std::string formula_csv(int d, int e) {
    std::ostringstream os;
    os << "k,num,den,approx\n";
    for (int k = 0; k <= d * e; ++k) {
        Rational r = closed_form_conjecture(d, e, k);
        os << k << ',' << num_str(r) << ',' << den_str(r) << ','
           << fmt_double(rational_to_double(r)) << '\n';
    }
    return os.str();
}

Json mu_json(const VarietySpec& spec, const MuReport& report) {
    Json j;
    j["variety"] = variety_json(spec);
    j["N"] = report.N;
    j["total"] = report.total.str();
    j["irreducible"] = report.irreducible.str();
    j["mu"] = rational_json(report.mu);
    return j;
}

std::string mu_csv(const MuReport& report) {
    std::ostringstream os;
    os << "N,total,irreducible,mu_num,mu_den,mu_approx\n";
    os << report.N << ',' << report.total.str() << ',' << report.irreducible.str() << ','
       << num_str(report.mu) << ',' << den_str(report.mu) << ','
       << fmt_double(rational_to_double(report.mu)) << '\n';
    return os.str();
}

Json tangency_json(const VarietySpec& spec, const TangencyReport& report,
                   const FieldCtx& witness_field, const FieldCtx& base) {
    Json j;
    j["variety"] = variety_json(spec);
    Json t;
    t["found"] = report.found;
    if (report.found) {
        t["level"] = report.level;
        t["pattern"] = report.pattern;
        Json rows(Json::value_t::array);
        for (const auto& row : report.witness_line_rows)
            rows.push_back(point_to_string(witness_field, row));
        t["witness_line"] = rows;
        if (!report.slicing_rows.empty()) {
            Json srows(Json::value_t::array);
            for (const auto& row : report.slicing_rows)
                srows.push_back(point_to_string(base, row));
            t["slicing_subspace"] = srows;
        }
    }
    t["levels_searched"] = report.levels_searched;
    t["degenerate"] = report.degenerate;
    if (report.trials_used > 0) t["trials_used"] = report.trials_used;
    if (!report.advisory.empty()) t["advisory"] = report.advisory;
    j["simple_tangency"] = t;
    return j;
}

std::string tangency_csv(const TangencyReport& report) {
    std::ostringstream os;
    os << "found,level,pattern,levels_searched,degenerate,trials_used\n";
    os << (report.found ? "true" : "false") << ',' << report.level << ',';
    for (std::size_t i = 0; i < report.pattern.size(); ++i) {
        if (i) os << '|';
        os << report.pattern[i];
    }
    os << ',';
    for (std::size_t i = 0; i < report.levels_searched.size(); ++i) {
        if (i) os << '|';
        os << report.levels_searched[i];
    }
    os << ',' << (report.degenerate ? "true" : "false") << ',' << report.trials_used << '\n';
    return os.str();
}

Json probe_json(const VarietySpec& spec, const ConjectureProbe& probe) {
    Json j;
    j["variety"] = variety_json(spec);
    j["e"] = probe.e;
    j["N"] = probe.N;
    j["samples"] = probe.samples;
    j["rejected"] = probe.rejected;
    Json counts(Json::value_t::object);
    for (const auto& [k, c] : probe.counts) counts[std::to_string(k)] = c;
    j["counts"] = counts;
    Json freq(Json::value_t::object);
    for (const auto& [k, f] : probe.freq) freq[std::to_string(k)] = f;
    j["freq"] = freq;
    Json se(Json::value_t::object);
    for (const auto& [k, s] : probe.stderr_by_k) se[std::to_string(k)] = s;
    j["se"] = se;
    Json lim(Json::value_t::object);
    for (std::size_t k = 0; k < probe.limit.size(); ++k)
        lim[std::to_string(k)] = rational_json(probe.limit[k]);
    j["limit"] = lim;
    return j;
}

std::string probe_csv(const ConjectureProbe& probe) {
    std::ostringstream os;
    os << "k,count,freq,se,limit_num,limit_den,limit_approx\n";
    std::set<std::uint64_t> keys;
    for (const auto& [k, c] : probe.counts) keys.insert(k);
    for (std::size_t k = 0; k < probe.limit.size(); ++k) keys.insert(k);
    for (auto k : keys) {
        std::uint64_t count = 0;
        auto it = probe.counts.find(k);
        if (it != probe.counts.end()) count = it->second;
        double f = 0.0, s = 0.0;
        auto fit = probe.freq.find(k);
        if (fit != probe.freq.end()) f = fit->second;
        auto sit = probe.stderr_by_k.find(k);
        if (sit != probe.stderr_by_k.end()) s = sit->second;
        os << k << ',' << count << ',' << fmt_double(f) << ',' << fmt_double(s) << ',';
        if (k < probe.limit.size()) {
            os << num_str(probe.limit[k]) << ',' << den_str(probe.limit[k]) << ','
               << fmt_double(rational_to_double(probe.limit[k]));
        } else {
            os << ",,";
        }
        os << '\n';
    }
    return os.str();
}

std::string plot_data(const Variety& var, const std::vector<ConvergenceRow>& rows) {
    std::ostringstream os;
    BigInt q = boost::multiprecision::pow(BigInt(var.spec().p), var.spec().e);
    for (const auto& row : rows) {
        BigInt qN = boost::multiprecision::pow(q, row.hist.N);
        os << qN.str() << ' ' << fmt_double(rational_to_double(row.deviation)) << '\n';
    }
    return os.str();
}

}  // namespace qslice
