#include "lgt/serialization.hpp"

#include "lgt/error.hpp"

#include <fstream>
#include <sstream>

namespace lgt {

std::string direction_name(Direction d)
{
    static const char *names[] = {"-x", "-y", "+x", "+y"};
    return names[d];
}

Direction direction_from_name(const std::string &s)
{
    for (int d = 0; d < 4; ++d)
        if (direction_name(Direction(d)) == s)
            return Direction(d);
    throw ConfigError("unknown direction '" + s + "'");
}

namespace {

Json opt_num(const std::optional<double> &v)
{
    return v ? Json(*v) : Json(nullptr);
}

std::optional<double> num_opt(const Json &j)
{
    if (j.is_null())
        return std::nullopt;
    return j.get<double>();
}

Json correlation_json(const std::vector<CorrelationPoint> &c)
{
    Json a = Json::array();
    for (auto &p : c)
        a.push_back({{"dx", p.dx}, {"dy", p.dy}, {"value", p.value}});
    return a;
}

std::vector<CorrelationPoint> correlation_from(const Json &a)
{
    std::vector<CorrelationPoint> out;
    for (auto &p : a)
        out.push_back({p.at("dx").get<int>(), p.at("dy").get<int>(), p.at("value").get<double>()});
    return out;
}

Json space_json(const BondSpace &s)
{
    return {{"charges", s.charges}, {"dims", s.dims}};
}

BondSpace space_from(const Json &j)
{
    BondSpace s;
    s.charges = j.at("charges").get<std::vector<int>>();
    s.dims = j.at("dims").get<std::vector<Index>>();
    if (s.charges.size() != s.dims.size())
        throw ConfigError("malformed bond space");
    return s;
}

} // namespace

Json to_json(const Couplings &c)
{
    Json j = {{"t", c.t},
              {"m", c.m},
              {"g_e_sq", c.g_e_sq},
              {"g_m_sq", c.g_m_sq},
              {"nu", c.nu},
              {"spin", c.spin},
              {"boundary_term", c.boundary_term == BoundaryTerm::dirichlet ? "dirichlet" : "none"},
              {"j_b", c.j_b}};
    Json pins = Json::array();
    for (auto &p : c.pinned)
        pins.push_back({{"site", p.site}, {"shift", p.shift}});
    j["pinned"] = pins;
    return j;
}

Couplings couplings_from_json(const Json &j)
{
    Couplings c;
    c.t = j.at("t").get<double>();
    c.m = j.at("m").get<double>();
    c.g_e_sq = j.at("g_e_sq").get<double>();
    c.g_m_sq = j.at("g_m_sq").get<double>();
    c.nu = j.value("nu", 0.0);
    c.spin = j.value("spin", 1);
    std::string bt = j.value("boundary_term", std::string("none"));
    if (bt == "dirichlet")
        c.boundary_term = BoundaryTerm::dirichlet;
    else if (bt != "none")
        throw ConfigError("unknown boundary term '" + bt + "'");
    c.j_b = j.value("j_b", 0.0);
    if (j.contains("pinned"))
        for (auto &p : j.at("pinned"))
            c.pinned.push_back({p.at("site").get<int>(), p.at("shift").get<double>()});
    return c;
}

Json to_json(const ObservableReport &r)
{
    Json fields = Json::array();
    for (auto &f : r.fields)
        fields.push_back({{"site", f.site},
                          {"dir", direction_name(f.dir)},
                          {"partner", f.partner},
                          {"E", f.field},
                          {"E_partner", f.partner_field},
                          {"violation", f.violation}});
    Json stats = Json::array();
    for (auto &[k, v] : r.solver_stats)
        stats.push_back({{"name", k}, {"value", v}});
    return {{"lattice", {{"lx", r.lx}, {"ly", r.ly}, {"boundary", to_string(r.boundary)}}},
            {"couplings", to_json(r.couplings)},
            {"Q", r.charge},
            {"solver", r.solver},
            {"solver_stats", stats},
            {"density", r.density},
            {"average_density", r.average_density},
            {"site_charge", r.site_charge},
            {"fields", fields},
            {"max_link_violation", r.max_link_violation},
            {"energy", r.energy},
            {"energy_density", r.energy_density},
            {"surface_charge", r.surface_charge},
            {"correlation", correlation_json(r.correlation)},
            {"connected_correlation", correlation_json(r.connected_correlation)},
            {"xi_full", opt_num(r.xi_full)},
            {"xi_connected", opt_num(r.xi_connected)},
            {"warnings", r.warnings}};
}

ObservableReport report_from_json(const Json &j)
{
    ObservableReport r;
    const Json &lat = j.at("lattice");
    r.lx = lat.at("lx").get<int>();
    r.ly = lat.at("ly").get<int>();
    r.boundary = boundary_from_string(lat.at("boundary").get<std::string>());
    r.couplings = couplings_from_json(j.at("couplings"));
    r.charge = j.at("Q").get<int>();
    r.solver = j.at("solver").get<std::string>();
    for (auto &s : j.at("solver_stats"))
        r.solver_stats.push_back({s.at("name").get<std::string>(), s.at("value").get<double>()});
    r.density = j.at("density").get<std::vector<double>>();
    r.average_density = j.at("average_density").get<double>();
    r.site_charge = j.at("site_charge").get<std::vector<double>>();
    for (auto &f : j.at("fields"))
        r.fields.push_back({f.at("site").get<int>(), direction_from_name(f.at("dir").get<std::string>()),
                            f.at("partner").get<int>(), f.at("E").get<double>(), f.at("E_partner").get<double>(),
                            f.at("violation").get<double>()});
    r.max_link_violation = j.at("max_link_violation").get<double>();
    r.energy = j.at("energy").get<double>();
    r.energy_density = j.at("energy_density").get<double>();
    r.surface_charge = j.at("surface_charge").get<std::vector<double>>();
    r.correlation = correlation_from(j.at("correlation"));
    r.connected_correlation = correlation_from(j.at("connected_correlation"));
    r.xi_full = num_opt(j.at("xi_full"));
    r.xi_connected = num_opt(j.at("xi_connected"));
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

FieldPlot field_plot(const ObservableReport &r)
{
    FieldPlot f;
    f.lx = r.lx;
    f.ly = r.ly;
    f.couplings = r.couplings;
    f.charge = r.charge;
    f.solver = r.solver;
    for (int x = 0; x < int(r.density.size()); ++x) {
        int i = x % r.lx, j = x / r.lx;
        f.sites.push_back({i, j, (i + j) % 2 ? -1 : 1, r.density[x], r.site_charge[x]});
    }
    for (auto &l : r.fields)
        f.links.push_back({l.site % r.lx, l.site / r.lx, direction_name(l.dir), l.field});
    return f;
}

Json to_json(const FieldPlot &f)
{
    Json sites = Json::array(), links = Json::array();
    for (auto &s : f.sites)
        sites.push_back({{"i", s.i}, {"j", s.j}, {"parity", s.parity}, {"density", s.density}, {"charge", s.charge}});
    for (auto &l : f.links)
        links.push_back({{"i", l.i}, {"j", l.j}, {"dir", l.dir}, {"E", l.E}});
    return {{"version", f.version},
            {"L", f.lx},
            {"Ly", f.ly},
            {"sites", sites},
            {"links", links},
            {"meta", {{"couplings", to_json(f.couplings)}, {"Q", f.charge}, {"solver", f.solver}}}};
}

FieldPlot field_plot_from_json(const Json &j)
{
    FieldPlot f;
    f.version = j.at("version").get<int>();
    if (f.version != field_plot_version)
        throw ConfigError("field plot schema version " + std::to_string(f.version) + " not supported");
    f.lx = j.at("L").get<int>();
    f.ly = j.value("Ly", f.lx);
    for (auto &s : j.at("sites"))
        f.sites.push_back({s.at("i").get<int>(), s.at("j").get<int>(), s.at("parity").get<int>(),
                           s.at("density").get<double>(), s.at("charge").get<double>()});
    for (auto &l : j.at("links")) {
        direction_from_name(l.at("dir").get<std::string>());
        f.links.push_back({l.at("i").get<int>(), l.at("j").get<int>(), l.at("dir").get<std::string>(),
                           l.at("E").get<double>()});
    }
    const Json &meta = j.at("meta");
    f.couplings = couplings_from_json(meta.at("couplings"));
    f.charge = meta.at("Q").get<int>();
    f.solver = meta.at("solver").get<std::string>();
    return f;
}

Json to_json(const Eigen::MatrixXd &m)
{
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const DressedBasis &b)
{
    Json states = Json::array();
    for (int i = 0; i < b.dim(); ++i) {
        const auto &s = b.state(i);
        states.push_back({{"phi", s.phi},
                          {"k", std::vector<int>(s.k.begin(), s.k.end())},
                          {"parity", b.parity()},
                          {"charge", b.charge(i)},
                          {"sign", s.sign}});
    }
    return {{"spin", b.spin()}, {"parity", b.parity()}, {"states", states}};
}

Json to_json(const HamiltonianSpec &h)
{
    const auto &g = h.geometry;
    Json ops = Json::array();
    for (auto &op : h.operators)
        ops.push_back({{"charge_shift", op.charge_shift}, {"matrix", to_json(op.matrix)}});
    Json terms = Json::array();
    for (auto &t : h.terms) {
        Json fac = Json::array();
        for (auto &f : t.factors)
            fac.push_back({{"site", f.site}, {"op", f.op}});
        terms.push_back({{"kind", to_string(t.kind)}, {"coefficient", t.coefficient}, {"factors", fac}});
    }
    Json bases = Json::array();
    for (int s = 0; s < h.num_sites(); ++s)
        bases.push_back(h.basis(s).dim());
    return {{"lattice", {{"lx", g.lx()}, {"ly", g.ly()}, {"boundary", to_string(g.boundary())}}},
            {"couplings", to_json(h.couplings)},
            {"site_dims", bases},
            {"operators", ops},
            {"terms", terms}};
}

Json to_json(const SpectrumResult &r, bool with_vectors)
{
    Json j = {{"energies", std::vector<double>(r.energies.data(), r.energies.data() + r.energies.size())},
              {"residuals", std::vector<double>(r.residuals.data(), r.residuals.data() + r.residuals.size())},
              {"iterations", r.iterations},
              {"converged", r.converged}};
    if (with_vectors) {
        Json vs = Json::array();
        for (Index c = 0; c < r.vectors.cols(); ++c)
            vs.push_back(std::vector<double>(r.vectors.col(c).data(), r.vectors.col(c).data() + r.vectors.rows()));
        j["vectors"] = vs;
    }
    return j;
}

Json checkpoint_to_json(const TtnState &st, const HamiltonianSpec &h)
{
    const auto &g = h.geometry;
    Json tensors = Json::array();
    for (auto &t : st.tensors) {
        Json blocks = Json::array();
        for (auto &[k, v] : t.blocks)
            blocks.push_back({{"key", std::vector<int>(k.begin(), k.end())},
                              {"data", std::vector<double>(v.data(), v.data() + v.size())}});
        tensors.push_back({{"legs", {space_json(t.legs[0]), space_json(t.legs[1]), space_json(t.legs[2])}},
                           {"blocks", blocks}});
    }
    const auto &s = st.schedule;
    Json hist = Json::array();
    for (auto &r : st.history)
        hist.push_back({{"sweep", r.sweep},
                        {"energy", r.energy},
                        {"physical_energy", r.physical_energy},
                        {"penalty", r.penalty},
                        {"nu", r.nu},
                        {"max_entropy", r.max_entropy},
                        {"max_truncation", r.max_truncation},
                        {"eps", r.eps},
                        {"seconds", r.seconds}});
    return {{"format", "lgt-ttn-checkpoint"},
            {"version", 1},
            {"lattice", {{"lx", g.lx()}, {"ly", g.ly()}, {"boundary", to_string(g.boundary())}}},
            {"spin", h.couplings.spin},
            {"charge", st.charge},
            {"chi", st.chi},
            {"seed", st.seed},
            {"center", st.center},
            {"schedule",
             {{"nu0", s.nu0},
              {"delta", s.delta},
              {"beta", s.beta},
              {"nu_max", s.nu_max},
              {"k", s.k},
              {"k_star", s.k_star},
              {"nu_star", s.nu_star},
              {"last_energy", s.last_energy},
              {"has_energy", s.has_energy}}},
            {"history", hist},
            {"tensors", tensors}};
}

TtnState checkpoint_from_json(const Json &j, const HamiltonianSpec &h)
{
    if (j.value("format", std::string()) != "lgt-ttn-checkpoint")
        throw ConfigError("not a TTN checkpoint");
    const auto &g = h.geometry;
    const Json &lat = j.at("lattice");
    if (lat.at("lx").get<int>() != g.lx() || lat.at("ly").get<int>() != g.ly() ||
        boundary_from_string(lat.at("boundary").get<std::string>()) != g.boundary() ||
        j.at("spin").get<int>() != h.couplings.spin)
        throw ConfigError("checkpoint does not match the Hamiltonian geometry");
    TtnState st;
    st.tree = TreeLayout(g);
    for (int s = 0; s < h.num_sites(); ++s)
        st.physical.push_back(physical_space(h.basis(s)));
    st.charge = j.at("charge").get<int>();
    st.chi = j.at("chi").get<int>();
    st.seed = j.at("seed").get<std::uint64_t>();
    st.center = j.at("center").get<int>();
    const Json &s = j.at("schedule");
    st.schedule.nu0 = s.at("nu0").get<double>();
    st.schedule.delta = s.at("delta").get<double>();
    st.schedule.beta = s.at("beta").get<double>();
    st.schedule.nu_max = s.at("nu_max").get<double>();
    st.schedule.k = s.at("k").get<int>();
    st.schedule.k_star = s.at("k_star").get<int>();
    st.schedule.nu_star = s.at("nu_star").get<double>();
    st.schedule.last_energy = s.at("last_energy").get<double>();
    st.schedule.has_energy = s.at("has_energy").get<bool>();
    for (auto &r : j.at("history"))
        st.history.push_back({r.at("sweep").get<int>(), r.at("energy").get<double>(),
                              r.at("physical_energy").get<double>(), r.at("penalty").get<double>(),
                              r.at("nu").get<double>(), r.at("max_entropy").get<double>(),
                              r.at("max_truncation").get<double>(), r.at("eps").get<double>(),
                              r.at("seconds").get<double>()});
    const Json &ts = j.at("tensors");
    if (int(ts.size()) != st.tree.size())
        throw ConfigError("checkpoint tensor count does not match the tree");
    for (auto &tj : ts) {
        BlockTensor<double> t;
        for (int l = 0; l < 3; ++l)
            t.legs[l] = space_from(tj.at("legs").at(l));
        for (auto &b : tj.at("blocks")) {
            auto key = b.at("key").get<std::vector<int>>();
            auto data = b.at("data").get<std::vector<double>>();
            if (key.size() != 3)
                throw ConfigError("malformed tensor block key");
            BlockTensor<double>::Key k{key[0], key[1], key[2]};
            auto shp = t.shape(k);
            if (Index(data.size()) != shp[0] * shp[1] * shp[2])
                throw ConfigError("tensor block size mismatch");
            t.blocks[k] = Eigen::Map<Eigen::VectorXd>(data.data(), Index(data.size()));
        }
        st.tensors.push_back(std::move(t));
    }
    return st;
}

Json read_json(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_json(const std::string &path, const Json &j)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out)
        throw IoError("write failed for " + path);
}

} // namespace lgt
