#include "phamp/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace phamp {

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Metadata::set(const std::string& key, const std::string& value)
{
    if (key.empty() || key.find_first_of(" =\n") != std::string::npos || value.find('\n') != std::string::npos)
        throw UsageError("metadata: bad key or value for '" + key + "'");
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = value;
            return;
        }
    entries_.emplace_back(key, value);
}

void Metadata::set(const std::string& key, double value) { set(key, format_double(value)); }
void Metadata::set(const std::string& key, int value) { set(key, std::to_string(value)); }

void Metadata::set(const std::string& key, const Vec3& v)
{
    set(key, format_double(v(0)) + " " + format_double(v(1)) + " " + format_double(v(2)));
}

void Metadata::set(const std::string& key, const Mat3& m)
{
    std::string s;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            s += (s.empty() ? "" : " ") + format_double(m(i, j));
    set(key, s);
}

bool Metadata::has(const std::string& key) const
{
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& Metadata::get(const std::string& key) const
{
    for (const auto& [k, v] : entries_)
        if (k == key)
            return v;
    throw UsageError("metadata: missing key '" + key + "'");
}

namespace {

std::vector<double> numbers(const std::string& key, const std::string& s, size_t count)
{
    std::istringstream is(s);
    std::vector<double> out;
    double x;
    while (is >> x)
        out.push_back(x);
    if (out.size() != count || !is.eof())
        throw UsageError("metadata: '" + key + "' expects " + std::to_string(count) + " number(s)");
    return out;
}

} // namespace

double Metadata::number(const std::string& key) const { return numbers(key, get(key), 1)[0]; }

int Metadata::integer(const std::string& key) const
{
    const double v = number(key);
    if (v != std::floor(v))
        throw UsageError("metadata: '" + key + "' is not an integer");
    return static_cast<int>(v);
}

Vec3 Metadata::vec3(const std::string& key) const
{
    const auto v = numbers(key, get(key), 3);
    return {v[0], v[1], v[2]};
}

Mat3 Metadata::mat3(const std::string& key) const
{
    const auto v = numbers(key, get(key), 9);
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m(i, j) = v[static_cast<size_t>(3 * i + j)];
    return m;
}

void Metadata::write(const fs::path& file) const
{
    std::ofstream os(file);
    if (!os)
        throw UsageError("cannot write " + file.string());
    for (const auto& [k, v] : entries_)
        os << k << " = " << v << "\n";
}

Metadata Metadata::read(const fs::path& file)
{
    std::ifstream is(file);
    if (!is)
        throw UsageError("cannot read " + file.string());
    Metadata m;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos)
            throw UsageError(file.string() + ": malformed line '" + line + "'");
        m.set(line.substr(0, eq), line.substr(eq + 3));
    }
    return m;
}

std::string sha256_hex(const fs::path& file)
{
    std::ifstream is(file, std::ios::binary);
    if (!is)
        throw UsageError("cannot read " + file.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw NumericalError("sha256: digest initialisation failed");
    std::vector<char> buf(1 << 16);
    while (is) {
        is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (is.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(is.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char b[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(b, sizeof b, "%02x", md[i]);
        hex += b;
    }
    return hex;
}

namespace {

std::vector<std::string> listed_files(const fs::path& dir)
{
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) {
            const std::string rel = fs::relative(e.path(), dir).generic_string();
            if (rel != "manifest.sha256")
                files.push_back(rel);
        }
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace

void write_manifest(const fs::path& dir)
{
    std::ofstream os(dir / "manifest.sha256");
    if (!os)
        throw UsageError("cannot write manifest in " + dir.string());
    for (const auto& f : listed_files(dir))
        os << sha256_hex(dir / f) << "  " << f << "\n";
}

std::vector<std::string> verify_manifest(const fs::path& dir)
{
    std::ifstream is(dir / "manifest.sha256");
    if (!is)
        throw UsageError("no manifest in " + dir.string());
    std::vector<std::string> bad;
    std::string line;
    while (std::getline(is, line)) {
        if (line.size() < 67)
            throw UsageError("manifest: malformed line '" + line + "'");
        const std::string hash = line.substr(0, 64), file = line.substr(66);
        if (!fs::exists(dir / file) || sha256_hex(dir / file) != hash)
            bad.push_back(file);
    }
    return bad;
}

void write_grid(const fs::path& file, const PeriodicGrid& g)
{
    std::ofstream os(file);
    if (!os)
        throw UsageError("cannot write " + file.string());
    g.write(os);
}

PeriodicGrid read_grid(const fs::path& file)
{
    std::ifstream is(file);
    if (!is)
        throw UsageError("cannot read " + file.string());
    return PeriodicGrid::read(is);
}

void write_floquet(const fs::path& dir, const FloquetData& fd)
{
    fs::create_directories(dir);
    Metadata m;
    m.set("N", fd.size());
    m.set("T", fd.T);
    m.set("x0", fd.x0);
    m.set("lambda1", fd.lambda1);
    m.set("lambda2", fd.lambda2);
    m.set("mu1", fd.mu1);
    m.set("mu2", fd.mu2);
    m.set("v1", fd.v1);
    m.set("v2", fd.v2);
    m.set("M", fd.M);
    m.set("R", fd.R);
    m.set("C", fd.C);
    m.set("J", fd.J);
    m.set("trivial_residual", fd.trivial_residual);
    m.set("closure", fd.closure);
    m.write(dir / "floquet.meta");
    write_grid(dir / "gamma.grid", fd.gamma);
    write_grid(dir / "Phi.grid", fd.Phi);
    write_grid(dir / "Q.grid", fd.Q);
}

std::shared_ptr<FloquetData> read_floquet(const fs::path& dir)
{
    const Metadata m = Metadata::read(dir / "floquet.meta");
    auto fd = std::make_shared<FloquetData>();
    fd->T = m.number("T");
    fd->x0 = m.vec3("x0");
    fd->lambda1 = m.number("lambda1");
    fd->lambda2 = m.number("lambda2");
    fd->mu1 = m.number("mu1");
    fd->mu2 = m.number("mu2");
    fd->v1 = m.vec3("v1");
    fd->v2 = m.vec3("v2");
    fd->M = m.mat3("M");
    fd->R = m.mat3("R");
    fd->C = m.mat3("C");
    fd->J = m.mat3("J");
    fd->trivial_residual = m.number("trivial_residual");
    fd->closure = m.number("closure");
    fd->gamma = read_grid(dir / "gamma.grid");
    fd->Phi = read_grid(dir / "Phi.grid");
    fd->Q = read_grid(dir / "Q.grid");
    const int n = m.integer("N");
    if (fd->gamma.size() != n || fd->Phi.size() != n || fd->Q.size() != n || fd->gamma.dim() != 3 ||
        fd->Phi.dim() != 9 || fd->Q.dim() != 9)
        throw UsageError(dir.string() + ": grid sizes do not match floquet.meta");
    return fd;
}

namespace {

std::string coeff_file(int a, int b) { return "K_" + std::to_string(a) + "_" + std::to_string(b) + ".grid"; }

} // namespace

void write_map(const fs::path& dir, const TaylorFourierMap& K, const Metadata& extra)
{
    write_floquet(dir, K.floquet());
    Metadata m;
    m.set("L", K.order());
    m.set("N", K.size());
    m.set("b1", K.b1());
    m.set("b2", K.b2());
    m.set("T", K.T());
    m.set("lambda1", K.lambda1());
    m.set("lambda2", K.lambda2());
    m.set("monomials", Jet2::count(K.order()));
    Metadata out = extra;
    for (const std::string key : {"L", "N", "b1", "b2", "T", "lambda1", "lambda2", "monomials"})
        out.set(key, m.get(key));
    out.write(dir / "map.meta");
    for (int deg = 0; deg <= K.order(); ++deg)
        for (int b = 0; b <= deg; ++b)
            write_grid(dir / coeff_file(deg - b, b), K.coeff(deg - b, b));
}

TaylorFourierMap read_map(const fs::path& dir)
{
    const Metadata m = Metadata::read(dir / "map.meta");
    auto fd = read_floquet(dir);
    TaylorFourierMap K(fd, m.integer("L"), m.number("b1"), m.number("b2"));
    if (K.size() != m.integer("N"))
        throw UsageError(dir.string() + ": map.meta N does not match the Floquet grids");
    for (int deg = 0; deg <= K.order(); ++deg)
        for (int b = 0; b <= deg; ++b) {
            PeriodicGrid g = read_grid(dir / coeff_file(deg - b, b));
            if (g.size() != K.size() || g.dim() != 3)
                throw UsageError(dir.string() + ": bad grid " + coeff_file(deg - b, b));
            K.set_coeff(deg - b, b, std::move(g));
        }
    return K;
}

} // namespace phamp
