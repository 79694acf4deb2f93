#include "pacsim/codeword.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace pacsim {

void polar_transform_inplace(Bits& u) {
    size_t N = u.size();
    if (N == 0 || (N & (N - 1)) != 0)
        throw std::invalid_argument("polar_transform: length must be a power of two");
    // butterfly for x = u F^(x)n: at stride h, fold the second half of each
    // block into the first, x[j] ^= x[j+h]
    for (size_t h = N >> 1; h >= 1; h >>= 1) {
        for (size_t blk = 0; blk < N; blk += 2 * h) {
            for (size_t j = blk; j < blk + h; ++j) u[j] ^= u[j + h];
        }
        if (h == 1) break;
    }
}

Bits polar_transform(Bits u) {
    polar_transform_inplace(u);
    return u;
}

ConvPoly ConvPoly::from_octal(const std::string& octal) {
    ConvPoly p;
    if (octal.empty()) return p;
    uint64_t v = 0;
    for (char c : octal) {
        if (c < '0' || c > '7') throw std::invalid_argument("bad octal digit in polynomial: " + octal);
        v = v * 8 + uint64_t(c - '0');
    }
    if (v == 0) throw std::invalid_argument("polynomial must be nonzero");
    int top = std::bit_width(v) - 1;
    // MSB-first read: the leading 1 of the literal is c_0
    for (int k = top; k >= 0; --k) p.coeff.push_back((v >> k) & 1);
    return p;
}

Bits conv_encode(const Bits& v, const ConvPoly& p) {
    if (p.is_polar()) return v;
    int N = int(v.size());
    int m = p.memory();
    Bits u(N);
    for (int j = 0; j < N; ++j) {
        uint8_t b = 0;
        int kmax = std::min(m, j);
        for (int k = 0; k <= kmax; ++k) b ^= uint8_t(p.coeff[k] & v[j - k]);
        u[j] = b;
    }
    return u;
}

Bits conv_invert(const Bits& u, const ConvPoly& p) {
    if (p.is_polar()) return u;
    int N = int(u.size());
    int m = p.memory();
    Bits v(N);
    for (int j = 0; j < N; ++j) {
        uint8_t b = u[j];
        int kmax = std::min(m, j);
        for (int k = 1; k <= kmax; ++k) b ^= uint8_t(p.coeff[k] & v[j - k]);
        v[j] = b; // c_0 = 1
    }
    return v;
}

Bits insert_data(const Bits& data, const std::vector<int>& info_set, int N) {
    if (data.size() != info_set.size())
        throw std::invalid_argument("insert_data: data length does not match info set");
    Bits v(size_t(N), 0);
    for (size_t k = 0; k < info_set.size(); ++k) {
        int i = info_set[k];
        if (i < 1 || i > N) throw std::invalid_argument("insert_data: info index out of range");
        v[size_t(i) - 1] = data[k];
    }
    return v;
}

Bits extract_data(const Bits& v, const std::vector<int>& info_set) {
    Bits d;
    d.reserve(info_set.size());
    for (int i : info_set) {
        if (i < 1 || size_t(i) > v.size())
            throw std::invalid_argument("extract_data: info index out of range");
        d.push_back(v[size_t(i) - 1]);
    }
    return d;
}

namespace {

std::vector<int> profile_by_key(int N, int K, const std::vector<double>& key) {
    // sort by (key desc, index desc) and keep the first K; ties at the cutoff
    // therefore prefer the larger index
    std::vector<int> idx(N);
    for (int i = 0; i < N; ++i) idx[size_t(i)] = i + 1;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        double ka = key[size_t(a) - 1], kb = key[size_t(b) - 1];
        if (ka != kb) return ka > kb;
        return a > b;
    });
    idx.resize(size_t(K));
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace

std::vector<int> rm_profile(int N, int K) {
    if (K < 1 || K > N) throw std::invalid_argument("rm_profile: K out of range");
    std::vector<double> wt(N);
    for (int i = 0; i < N; ++i) wt[size_t(i)] = double(std::popcount(unsigned(i)));
    return profile_by_key(N, K, wt);
}

std::vector<int> capacity_profile(int N, int K, const std::vector<double>& capacity) {
    if (int(capacity.size()) != N)
        throw std::invalid_argument("capacity_profile: capacity vector length mismatch");
    if (K < 1 || K > N) throw std::invalid_argument("capacity_profile: K out of range");
    return profile_by_key(N, K, capacity);
}

} // namespace pacsim
