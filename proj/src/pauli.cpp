#include "qcmc/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "qcmc/rng.hpp"

namespace qcmc {

namespace {

void check_qubit_count(int n) {
    if (n < 1 || n > 63) throw ValidationError("qubit count must be in [1, 63], got " + std::to_string(n));
}

std::uint64_t bit(int q) { return std::uint64_t{1} << q; }

}  // namespace

PauliString::PauliString(int n_qubits) : n_qubits_(n_qubits) {
    check_qubit_count(n_qubits);
}

PauliString::PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask)
    : n_qubits_(n_qubits), x_mask_(x_mask), z_mask_(z_mask) {
    check_qubit_count(n_qubits);
    const std::uint64_t valid = (n_qubits == 63) ? ~std::uint64_t{0} : (bit(n_qubits) - 1);
    if ((x_mask & ~valid) || (z_mask & ~valid))
        throw ValidationError("Pauli mask addresses qubits beyond n_qubits");
}

PauliString::PauliString(std::string_view word) : n_qubits_(static_cast<int>(word.size())) {
    check_qubit_count(n_qubits_);
    for (int q = 0; q < n_qubits_; ++q) {
        switch (word[q]) {
            case 'I': case 'i': break;
            case 'X': case 'x': x_mask_ |= bit(q); break;
            case 'Y': case 'y': x_mask_ |= bit(q); z_mask_ |= bit(q); break;
            case 'Z': case 'z': z_mask_ |= bit(q); break;
            default:
                throw ValidationError(std::string("invalid Pauli letter '") + word[q] + "'");
        }
    }
}

Axis PauliString::axis(int qubit) const {
    const bool x = x_mask_ & bit(qubit);
    const bool z = z_mask_ & bit(qubit);
    if (x && z) return Axis::Y;
    if (x) return Axis::X;
    if (z) return Axis::Z;
    return Axis::I;
}

void PauliString::set_axis(int qubit, Axis a) {
    if (qubit < 0 || qubit >= n_qubits_) throw ValidationError("qubit index out of range");
    x_mask_ &= ~bit(qubit);
    z_mask_ &= ~bit(qubit);
    if (a == Axis::X || a == Axis::Y) x_mask_ |= bit(qubit);
    if (a == Axis::Z || a == Axis::Y) z_mask_ |= bit(qubit);
}

int PauliString::weight() const { return std::popcount(x_mask_ | z_mask_); }

bool PauliString::commutes_with(const PauliString& other) const {
    const int anti = std::popcount(x_mask_ & other.z_mask_) + std::popcount(z_mask_ & other.x_mask_);
    return anti % 2 == 0;
}

std::string PauliString::word() const {
    std::string w(n_qubits_, 'I');
    for (int q = 0; q < n_qubits_; ++q) {
        switch (axis(q)) {
            case Axis::I: break;
            case Axis::X: w[q] = 'X'; break;
            case Axis::Y: w[q] = 'Y'; break;
            case Axis::Z: w[q] = 'Z'; break;
        }
    }
    return w;
}

Hamiltonian::Hamiltonian(int n_qubits, std::vector<PauliTerm> terms,
                         std::vector<std::vector<int>> groups)
    : n_qubits_(n_qubits), terms_(std::move(terms)), groups_(std::move(groups)) {
    check_qubit_count(n_qubits);
    if (terms_.empty()) throw ValidationError("Hamiltonian needs at least one term");

    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const PauliTerm& t = terms_[j];
        if (!std::isfinite(t.coeff) || t.coeff == 0.0)
            throw ValidationError("term " + std::to_string(j) + ": coefficient must be finite and nonzero");
        if (t.string.n_qubits() != n_qubits)
            throw ValidationError("term " + std::to_string(j) + ": qubit count mismatch");
        if (t.string.is_identity())
            throw ValidationError("term " + std::to_string(j) + ": identity term violates tracelessness");
        h_tot_ += std::abs(t.coeff);
    }

    std::vector<char> seen(terms_.size(), 0);
    for (const auto& g : groups_) {
        if (g.empty()) throw ValidationError("empty Trotter group");
        for (int idx : g) {
            if (idx < 0 || idx >= static_cast<int>(terms_.size()))
                throw ValidationError("group index out of range");
            if (seen[idx]) throw ValidationError("term appears in more than one group");
            seen[idx] = 1;
        }
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = a + 1; b < g.size(); ++b)
                if (!terms_[g[a]].string.commutes_with(terms_[g[b]].string))
                    throw ValidationError("terms " + std::to_string(g[a]) + " and " + std::to_string(g[b]) +
                                          " in one Trotter group do not commute");
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw ValidationError("Trotter groups do not cover all terms");

    // FNV-1a over the exact content
    std::uint64_t h = 14695981039346656037ull;
    auto mixin = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mixin(static_cast<std::uint64_t>(n_qubits_));
    for (const auto& t : terms_) {
        std::uint64_t c;
        static_assert(sizeof(double) == 8);
        std::memcpy(&c, &t.coeff, 8);
        mixin(c);
        mixin(t.string.x_mask());
        mixin(t.string.z_mask());
    }
    for (const auto& g : groups_) {
        mixin(g.size());
        for (int idx : g) mixin(static_cast<std::uint64_t>(idx));
    }
    hash_ = h;
}

Hamiltonian Hamiltonian::ungrouped(int n_qubits, std::vector<PauliTerm> terms) {
    std::vector<std::vector<int>> groups(terms.size());
    for (std::size_t j = 0; j < terms.size(); ++j) groups[j] = {static_cast<int>(j)};
    return Hamiltonian(n_qubits, std::move(terms), std::move(groups));
}

Hamiltonian Hamiltonian::scaled(double c) const {
    if (!std::isfinite(c) || c == 0.0) throw ValidationError("scale factor must be finite and nonzero");
    std::vector<PauliTerm> terms = terms_;
    for (auto& t : terms) t.coeff *= c;
    return Hamiltonian(n_qubits_, std::move(terms), groups_);
}

int ModelSpec::n_qubits() const {
    switch (family) {
        case Family::Tfi1d:
        case Family::Afh1d:
        case Family::RandomK:
        case Family::Random2: return n_spin;
        case Family::Tfi2d: return rows * cols;
        case Family::Fh1d: return 2 * n_site;
        case Family::File: return 0;  // known after loading
    }
    return 0;
}

std::string ModelSpec::name() const {
    std::ostringstream os;
    switch (family) {
        case Family::Tfi1d: os << "tfi1d_n" << n_spin << "_lam" << lambda; break;
        case Family::Tfi2d: os << "tfi2d_" << rows << "x" << cols << "_lam" << lambda; break;
        case Family::Afh1d: os << "afh1d_n" << n_spin << "_lam" << lambda; break;
        case Family::Fh1d: os << "fh1d_s" << n_site << "_lam" << lambda; break;
        case Family::RandomK: os << "randomk_n" << n_spin << "_t" << n_term << "_s" << seed; break;
        case Family::Random2: os << "random2_n" << n_spin << "_t" << n_term << "_s" << seed; break;
        case Family::File: os << "file"; break;
    }
    return os.str();
}

ModelSpec::Family parse_family(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "tfi1d") return ModelSpec::Family::Tfi1d;
    if (s == "tfi2d") return ModelSpec::Family::Tfi2d;
    if (s == "afh1d") return ModelSpec::Family::Afh1d;
    if (s == "fh1d") return ModelSpec::Family::Fh1d;
    if (s == "randomk" || s == "random_k") return ModelSpec::Family::RandomK;
    if (s == "random2" || s == "random_2") return ModelSpec::Family::Random2;
    if (s == "file") return ModelSpec::Family::File;
    throw ValidationError("unknown model family '" + std::string(name) + "'");
}

namespace {

PauliString two_site(int n, int i, Axis ai, int j, Axis aj) {
    PauliString p(n);
    p.set_axis(i, ai);
    p.set_axis(j, aj);
    return p;
}

PauliString one_site(int n, int i, Axis a) {
    PauliString p(n);
    p.set_axis(i, a);
    return p;
}

// Ring edges (i, i+1 mod n); a 2-site ring has a single bond.
std::vector<std::pair<int, int>> ring_edges(int n) {
    std::vector<std::pair<int, int>> e;
    if (n == 2) {
        e.push_back({0, 1});
    } else {
        for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    }
    return e;
}

Hamiltonian build_tfi1d(const ModelSpec& spec) {
    const int n = spec.n_spin;
    if (n < 2) throw ValidationError("tfi1d requires n_spin >= 2");
    std::vector<PauliTerm> terms;
    std::vector<int> zz_group, x_group;
    const double jz = -(2.0 - spec.lambda);
    for (auto [i, j] : ring_edges(n)) {
        zz_group.push_back(static_cast<int>(terms.size()));
        terms.push_back({jz, two_site(n, i, Axis::Z, j, Axis::Z)});
    }
    for (int i = 0; i < n; ++i) {
        x_group.push_back(static_cast<int>(terms.size()));
        terms.push_back({-spec.lambda, one_site(n, i, Axis::X)});
    }
    return Hamiltonian(n, std::move(terms), {zz_group, x_group});
}

Hamiltonian build_tfi2d(const ModelSpec& spec) {
    const int r = spec.rows, c = spec.cols;
    if (r < 3 || c < 3)
        throw ValidationError("tfi2d requires rows and cols >= 3 (smaller tori double-count edges)");
    const int n = r * c;
    auto site = [c](int i, int j) { return i * c + j; };
    std::vector<PauliTerm> terms;
    std::vector<int> zz_group, x_group;
    const double jz = -(2.0 - spec.lambda);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) {
            zz_group.push_back(static_cast<int>(terms.size()));
            terms.push_back({jz, two_site(n, site(i, j), Axis::Z, site(i, (j + 1) % c), Axis::Z)});
            zz_group.push_back(static_cast<int>(terms.size()));
            terms.push_back({jz, two_site(n, site(i, j), Axis::Z, site((i + 1) % r, j), Axis::Z)});
        }
    }
    for (int q = 0; q < n; ++q) {
        x_group.push_back(static_cast<int>(terms.size()));
        terms.push_back({-spec.lambda, one_site(n, q, Axis::X)});
    }
    return Hamiltonian(n, std::move(terms), {zz_group, x_group});
}

Hamiltonian build_afh1d(const ModelSpec& spec) {
    const int n = spec.n_spin;
    if (n < 2 || n % 2 != 0) throw ValidationError("afh1d requires even n_spin >= 2");
    std::vector<PauliTerm> terms;
    std::vector<int> xx, yy, zz;
    const double jxy = 0.5 * (2.0 - spec.lambda);
    for (auto [i, j] : ring_edges(n)) {
        xx.push_back(static_cast<int>(terms.size()));
        terms.push_back({jxy, two_site(n, i, Axis::X, j, Axis::X)});
    }
    for (auto [i, j] : ring_edges(n)) {
        yy.push_back(static_cast<int>(terms.size()));
        terms.push_back({jxy, two_site(n, i, Axis::Y, j, Axis::Y)});
    }
    for (auto [i, j] : ring_edges(n)) {
        zz.push_back(static_cast<int>(terms.size()));
        terms.push_back({spec.lambda, two_site(n, i, Axis::Z, j, Axis::Z)});
    }
    return Hamiltonian(n, std::move(terms), {xx, yy, zz});
}

// Jordan-Wigner strings of the periodic 1D Fermi-Hubbard model, written out
// verbatim: modes 1..n_site are spin-up, n_site+1..2n_site spin-down
// (0-indexed internally). Boundary hops carry the Z string across the
// interior of each spin sector.
Hamiltonian build_fh1d(const ModelSpec& spec) {
    const int ns = spec.n_site;
    if (ns < 2 || ns % 2 != 0) throw ValidationError("fh1d requires even n_site >= 2");
    const int n = 2 * ns;
    const double hop = -0.5 * (2.0 - spec.lambda);
    std::vector<PauliTerm> terms;
    std::vector<int> gx, gy, gz;

    auto chain_term = [&](Axis a, int offset) {
        for (int i = 0; i < ns - 1; ++i)
            terms.push_back({hop, two_site(n, offset + i, a, offset + i + 1, a)});
    };
    auto boundary_term = [&](Axis a, int offset) {
        // (prod_{j=2}^{n_site-1} Z_j) A_1 A_{n_site}, per spin sector
        PauliString p(n);
        p.set_axis(offset, a);
        p.set_axis(offset + ns - 1, a);
        for (int j = 1; j < ns - 1; ++j) p.set_axis(offset + j, Axis::Z);
        terms.push_back({hop, p});
    };

    // H_X: XX chains plus Z-string YY boundary hops
    for (int spin = 0; spin < 2; ++spin) chain_term(Axis::X, spin * ns);
    for (int spin = 0; spin < 2; ++spin) boundary_term(Axis::Y, spin * ns);
    for (int j = 0; j < 2 * (ns - 1) + 2; ++j) gx.push_back(j);

    // H_Y: YY chains plus Z-string XX boundary hops
    const int y_start = static_cast<int>(terms.size());
    for (int spin = 0; spin < 2; ++spin) chain_term(Axis::Y, spin * ns);
    for (int spin = 0; spin < 2; ++spin) boundary_term(Axis::X, spin * ns);
    for (int j = y_start; j < static_cast<int>(terms.size()); ++j) gy.push_back(j);

    // H_Z: on-site interaction 2 lambda Z_i Z_{n_site+i}
    const int z_start = static_cast<int>(terms.size());
    for (int i = 0; i < ns; ++i)
        terms.push_back({2.0 * spec.lambda, two_site(n, i, Axis::Z, ns + i, Axis::Z)});
    for (int j = z_start; j < static_cast<int>(terms.size()); ++j) gz.push_back(j);

    return Hamiltonian(n, std::move(terms), {gx, gy, gz});
}

// Shared tail of the random families: field part -lambda_0 sum_j Z_j plus
// n_term random strings with |lambda_l| normalised so that
// n lambda_0 + sum|lambda_l| = 2n. One term per Trotter group.
Hamiltonian assemble_random(int n, int n_term, std::vector<PauliString> strings, Rng& rng) {
    const double lambda0 = 2.0 * n / (n + n_term);
    const double target = 2.0 * n * n_term / static_cast<double>(n + n_term);
    std::vector<double> lam(n_term);
    double sum_abs = 0.0;
    for (int l = 0; l < n_term; ++l) {
        do {
            lam[l] = rng.uniform(-1.0, 1.0);
        } while (lam[l] == 0.0);
        sum_abs += std::abs(lam[l]);
    }
    const double scale = target / sum_abs;
    std::vector<PauliTerm> terms;
    terms.reserve(n + n_term);
    for (int j = 0; j < n; ++j) terms.push_back({-lambda0, one_site(n, j, Axis::Z)});
    for (int l = 0; l < n_term; ++l) terms.push_back({lam[l] * scale, std::move(strings[l])});
    return Hamiltonian::ungrouped(n, std::move(terms));
}

Hamiltonian build_random_k(const ModelSpec& spec) {
    const int n = spec.n_spin;
    if (n < 1) throw ValidationError("randomk requires n_spin >= 1");
    if (spec.n_term < 1) throw ValidationError("randomk requires n_term >= 1");
    Rng rng = Rng(spec.seed).derive(0x6b);
    std::vector<PauliString> strings;
    strings.reserve(spec.n_term);
    for (int l = 0; l < spec.n_term; ++l) {
        PauliString p(n);
        do {
            p = PauliString(n);
            for (int q = 0; q < n; ++q) {
                // axes (I,X,Y,Z) with probabilities (1/2, 1/6, 1/6, 1/6)
                const double u = rng.uniform();
                if (u < 0.5) continue;
                if (u < 0.5 + 1.0 / 6.0) p.set_axis(q, Axis::X);
                else if (u < 0.5 + 2.0 / 6.0) p.set_axis(q, Axis::Y);
                else p.set_axis(q, Axis::Z);
            }
        } while (p.is_identity());  // identity would break tracelessness
        strings.push_back(p);
    }
    return assemble_random(n, spec.n_term, std::move(strings), rng);
}

Hamiltonian build_random_2(const ModelSpec& spec) {
    const int n = spec.n_spin;
    if (n < 2) throw ValidationError("random2 requires n_spin >= 2");
    if (spec.n_term < 1) throw ValidationError("random2 requires n_term >= 1");
    Rng rng = Rng(spec.seed).derive(0x62);
    auto xy_axis = [&rng]() { return rng.below(2) == 0 ? Axis::X : Axis::Y; };
    auto xyz_axis = [&rng]() {
        const auto r = rng.below(3);
        return r == 0 ? Axis::X : (r == 1 ? Axis::Y : Axis::Z);
    };
    std::vector<PauliString> strings;
    strings.reserve(spec.n_term);
    for (int l = 1; l <= spec.n_term; ++l) {
        PauliString p(n);
        if (l <= n - 1) {
            // couple qubit l+1 to an earlier one so all spins end up coupled
            const int j2 = l;                                    // 0-indexed l+1
            const int j1 = static_cast<int>(rng.below(l));       // uniform over {1..l}
            p.set_axis(j1, xy_axis());
            p.set_axis(j2, xy_axis());
        } else {
            const int j1 = static_cast<int>(rng.below(n));
            int j2 = static_cast<int>(rng.below(n - 1));
            if (j2 >= j1) ++j2;
            p.set_axis(j1, xyz_axis());
            p.set_axis(j2, xyz_axis());
        }
        strings.push_back(p);
    }
    return assemble_random(n, spec.n_term, std::move(strings), rng);
}

}  // namespace

Hamiltonian build_model(const ModelSpec& spec) {
    switch (spec.family) {
        case ModelSpec::Family::Tfi1d: return build_tfi1d(spec);
        case ModelSpec::Family::Tfi2d: return build_tfi2d(spec);
        case ModelSpec::Family::Afh1d: return build_afh1d(spec);
        case ModelSpec::Family::Fh1d: return build_fh1d(spec);
        case ModelSpec::Family::RandomK: return build_random_k(spec);
        case ModelSpec::Family::Random2: return build_random_2(spec);
        case ModelSpec::Family::File:
            if (spec.path.empty()) throw ValidationError("file model requires a path");
            return load_hamiltonian_file(spec.path);
    }
    throw ValidationError("unknown model family");
}

Hamiltonian parse_hamiltonian_text(std::string_view text) {
    std::vector<PauliTerm> terms;
    int n_qubits = -1;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string coeff_tok, word_tok, extra;
        if (!(ls >> coeff_tok)) continue;  // blank/comment line
        if (!(ls >> word_tok))
            throw ValidationError("line " + std::to_string(line_no) + ": expected 'coeff pauli-word'");
        if (ls >> extra)
            throw ValidationError("line " + std::to_string(line_no) + ": trailing tokens");
        double coeff;
        std::size_t used = 0;
        try {
            coeff = std::stod(coeff_tok, &used);
        } catch (const std::exception&) {
            throw ValidationError("line " + std::to_string(line_no) + ": malformed coefficient '" + coeff_tok + "'");
        }
        if (used != coeff_tok.size() || !std::isfinite(coeff))
            throw ValidationError("line " + std::to_string(line_no) + ": malformed coefficient '" + coeff_tok + "'");
        PauliString p = [&]() {
            try {
                return PauliString(word_tok);
            } catch (const ValidationError& e) {
                throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }();
        if (n_qubits == -1) {
            n_qubits = p.n_qubits();
        } else if (p.n_qubits() != n_qubits) {
            throw ValidationError("line " + std::to_string(line_no) + ": inconsistent word length");
        }
        if (p.is_identity() && coeff != 0.0)
            throw ValidationError("line " + std::to_string(line_no) + ": identity word with nonzero coefficient");
        terms.push_back({coeff, std::move(p)});
    }
    if (terms.empty()) throw ValidationError("no terms found in Hamiltonian text");
    return Hamiltonian::ungrouped(n_qubits, std::move(terms));
}

std::string serialize_hamiltonian(const Hamiltonian& h) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& group : h.groups())
        for (int idx : group)
            os << h.terms()[idx].coeff << " " << h.terms()[idx].string.word() << "\n";
    return os.str();
}

Hamiltonian load_hamiltonian_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open Hamiltonian file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_hamiltonian_text(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

}  // namespace qcmc
