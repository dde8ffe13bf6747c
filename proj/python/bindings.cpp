// Python bindings for the core operations: building codes, encoding,
// erasure decoding, repair with its traffic ledger, verification sweeps,
// and bundle round trips.  Field elements cross the boundary as packed
// base-p integer values in [0, q).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rackmsr/codes.hpp"
#include "rackmsr/io.hpp"
#include "rackmsr/lambdas.hpp"
#include "rackmsr/params.hpp"
#include "rackmsr/repair.hpp"
#include "rackmsr/verify.hpp"

namespace py = pybind11;
using namespace rackmsr;

namespace {

Codeword word_in(const RackCode& code, const std::vector<uint32_t>& values) {
    const CodeParams& p = code.params();
    size_t want = static_cast<size_t>(p.n) * p.l;
    if (values.size() != want)
        throw std::invalid_argument("word needs " + std::to_string(want) + " values, got " +
                                    std::to_string(values.size()));
    Codeword w(values.size());
    for (size_t i = 0; i < values.size(); ++i) w[i] = code.field()->from_value(values[i]);
    return w;
}

std::vector<uint32_t> word_out(const RackCode& code, const Codeword& w) {
    std::vector<uint32_t> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) out[i] = code.field()->value(w[i]);
    return out;
}

py::dict params_dict(const CodeParams& p, const Field* F) {
    py::dict d;
    d["n"] = p.n;
    d["k"] = p.k;
    d["u"] = p.u;
    d["d_bar"] = p.dbar;
    d["theorem"] = theorem_name(p.theorem);
    d["racks"] = p.nbar;
    d["k_bar"] = p.kbar;
    d["v"] = p.v;
    d["r"] = p.r;
    d["r_bar"] = p.rbar;
    d["s_bar"] = p.sbar;
    d["group"] = p.group;
    d["l"] = p.l;
    d["l_bar"] = p.lbar;
    d["h_max"] = p.h_max;
    d["shortened"] = p.shortened;
    if (F) d["q"] = F->q();
    return d;
}

struct PyCode {
    RackCode code;
    io::Experiment exp;

    static PyCode make(uint32_t p, uint32_t m, uint32_t n, uint32_t k, uint32_t u,
                       uint32_t dbar, const std::string& theorem,
                       std::optional<std::vector<uint32_t>> modulus, const std::string& mode,
                       const std::string& strategy, uint64_t seed) {
        auto F = Field::make(p, m, std::move(modulus));
        CodeParams cp = derive(n, k, u, dbar, theorem_from_name(theorem));
        SearchStrategy st;
        if (strategy == "greedy")
            st = SearchStrategy::greedy;
        else if (strategy == "random")
            st = SearchStrategy::random;
        else
            throw std::invalid_argument("strategy must be 'greedy' or 'random'");
        LambdaSet ls;
        if (mode == "explicit") {
            ls = explicit_lambdas(F.get(), cp);
        } else if (mode == "search") {
            ls = search_lambdas(F.get(), cp, st, seed);
        } else if (mode == "auto") {
            try {
                ls = explicit_lambdas(F.get(), cp);
            } catch (const Error&) {
                ls = search_lambdas(F.get(), cp, st, seed);
            }
        } else {
            throw std::invalid_argument("mode must be 'explicit', 'search', or 'auto'");
        }
        return {RackCode(std::move(F), cp, std::move(ls)), {}};
    }

    static PyCode load(const std::string& path) {
        io::Bundle b = io::load_bundle(path);
        return {io::code_from_bundle(b), b.experiment};
    }

    void save(const std::string& path) const { io::save_bundle(path, io::bundle_of(code, exp)); }

    py::dict coefficients() const {
        const Field* F = code.field();
        const LambdaSet& ls = code.lambdas();
        py::dict d;
        d["theta"] = F->value(ls.theta);
        py::list vals;
        for (Felt x : ls.lam) vals.append(F->value(x));
        d["values"] = vals;
        d["mode"] = ls.mode == LambdaSet::Mode::searched ? "search" : "explicit";
        if (ls.mode == LambdaSet::Mode::searched) {
            d["strategy"] = ls.strategy;
            d["seed"] = ls.seed;
        }
        return d;
    }

    std::vector<uint32_t> encode(const std::vector<uint32_t>& message) const {
        const CodeParams& p = code.params();
        size_t want = static_cast<size_t>(p.k) * p.l;
        if (message.size() != want)
            throw std::invalid_argument("message needs " + std::to_string(want) +
                                        " values, got " + std::to_string(message.size()));
        std::vector<Felt> msg(message.size());
        for (size_t i = 0; i < message.size(); ++i)
            msg[i] = code.field()->from_value(message[i]);
        return word_out(code, code.encode(msg));
    }

    std::vector<uint32_t> random_codeword(uint64_t seed) const {
        return word_out(code, code.random_codeword(seed));
    }

    bool is_codeword(const std::vector<uint32_t>& values) const {
        return code.is_codeword(word_in(code, values));
    }

    std::vector<uint32_t> erase_decode(const std::vector<uint32_t>& values,
                                       const std::vector<uint32_t>& erased) const {
        return word_out(code, code.erase_decode(word_in(code, values), erased));
    }

    py::dict do_repair(const std::vector<uint32_t>& values, uint32_t host,
                       const std::vector<uint32_t>& failed, const std::vector<uint32_t>& helpers,
                       std::optional<uint32_t> extra) const {
        Codeword w = word_in(code, values);
        RepairPlan plan = plan_repair(code.params(), host, failed, helpers, extra);
        RepairResult r = repair(code, w, plan);
        py::dict d;
        py::list rec;
        for (const auto& col : r.recovered) {
            py::list vals;
            for (Felt x : col) vals.append(code.field()->value(x));
            rec.append(vals);
        }
        d["recovered"] = rec;
        d["failed_nodes"] = [&] {
            py::list nodes;
            for (uint32_t i : plan.I) nodes.append(host * code.params().u + i);
            return nodes;
        }();
        d["bandwidth"] = r.bandwidth;
        d["bandwidth_bound"] = r.bound_bw;
        d["bandwidth_optimal"] = r.optimal_bw;
        d["ratio"] = r.ratio.str();
        d["access"] = r.access;
        d["access_bound"] = r.bound_access.str();
        d["access_optimal"] = r.optimal_access;
        py::list racks;
        for (const RackTraffic& t : r.per_rack) {
            py::dict rd;
            rd["rack"] = t.rack;
            rd["sent"] = t.sent;
            rd["accessed"] = t.accessed;
            rd["rounds"] = t.rounds;
            racks.append(rd);
        }
        d["per_rack"] = racks;
        return d;
    }

    py::list do_verify(const std::string& mds, uint32_t trials,
                       std::optional<std::vector<uint32_t>> h, bool folded, bool kernels,
                       uint64_t seed) const {
        io::Experiment e;
        e.verify.mds = mds;
        e.verify.folded = folded;
        e.verify.kernels = kernels;
        e.repair.trials = trials;
        if (h) e.repair.h = *h;
        verify::Report rep = verify::run_all(code, e, seed);
        py::list out;
        for (const verify::CheckOutcome& c : rep.checks) {
            py::dict d;
            d["name"] = c.name;
            d["ok"] = c.ok;
            d["cases"] = c.cases;
            d["seconds"] = c.seconds;
            d["detail"] = c.detail;
            out.append(d);
        }
        return out;
    }
};

} // namespace

PYBIND11_MODULE(_rackmsr, m) {
    m.doc() = "Rack-aware MSR array codes: construction, erasure decoding, and "
              "bandwidth-optimal multi-node repair.";

    m.def("omega", &omega, py::arg("s_bar"), py::arg("u"),
          "Number of two-column-group determinant conditions behind the sufficient "
          "field-size bound.");
    m.def(
        "derive",
        [](uint32_t n, uint32_t k, uint32_t u, uint32_t dbar, const std::string& theorem) {
            return params_dict(derive(n, k, u, dbar, theorem_from_name(theorem)), nullptr);
        },
        py::arg("n"), py::arg("k"), py::arg("u"), py::arg("d_bar"), py::arg("theorem") = "T1",
        "Validates a parameter tuple and returns every derived quantity.");

    py::class_<PyCode>(m, "Code",
                       "One code instance over GF(p^m).  Words are flat lists of field "
                       "values, node-major: node i owns entries [i*l, (i+1)*l).")
        .def(py::init(&PyCode::make), py::arg("p"), py::arg("m"), py::arg("n"), py::arg("k"),
             py::arg("u"), py::arg("d_bar"), py::kw_only(), py::arg("theorem") = "T1",
             py::arg("modulus") = py::none(), py::arg("mode") = "auto",
             py::arg("strategy") = "greedy", py::arg("seed") = 0,
             "Builds a code.  mode 'explicit' uses xi^i coefficients, 'search' selects "
             "them, 'auto' falls back from explicit to search.")
        .def_static("load", &PyCode::load, py::arg("path"),
                    "Rebuilds a code from a bundle file, re-verifying coefficients and "
                    "the parity hash.")
        .def("save", &PyCode::save, py::arg("path"), "Writes the bundle file (stable bytes).")
        .def_property_readonly(
            "params", [](const PyCode& c) { return params_dict(c.code.params(), c.code.field()); })
        .def_property_readonly("l", [](const PyCode& c) { return c.code.params().l; })
        .def_property_readonly("q", [](const PyCode& c) { return c.code.field()->q(); })
        .def("coefficients", &PyCode::coefficients,
             "Theta and the coefficient values, with how they were chosen.")
        .def("parity_hash", [](const PyCode& c) { return io::parity_hash(c.code); })
        .def("bandwidth_bound",
             [](const PyCode& c, uint32_t h) { return bandwidth_bound(c.code.params(), h); },
             py::arg("h"), "Minimum inter-rack download for h failures in one rack.")
        .def("access_bound",
             [](const PyCode& c, uint32_t h) { return access_bound(c.code.params(), h).str(); },
             py::arg("h"), "Minimum helper-rack reads, as an exact fraction string.")
        .def("encode", &PyCode::encode, py::arg("message"),
             "Extends k*l message values to a full n*l codeword.")
        .def("random_codeword", &PyCode::random_codeword, py::arg("seed"))
        .def("is_codeword", &PyCode::is_codeword, py::arg("word"))
        .def("erase_decode", &PyCode::erase_decode, py::arg("word"), py::arg("erased"),
             "Recovers up to r erased node columns; erased lists node indices.")
        .def("repair", &PyCode::do_repair, py::arg("word"), py::arg("host"), py::arg("failed"),
             py::arg("helpers"), py::kw_only(), py::arg("extra") = py::none(),
             "Repairs the failed in-rack positions from the helper racks and returns "
             "the recovered columns plus the traffic ledger.")
        .def("verify", &PyCode::do_verify, py::kw_only(), py::arg("mds") = "exhaustive",
             py::arg("trials") = 10, py::arg("h") = py::none(), py::arg("folded") = true,
             py::arg("kernels") = true, py::arg("seed") = 0,
             "Runs the verification sweeps and returns one result dict per check.");
}
