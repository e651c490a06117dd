// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hybridcast/channel.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace hybridcast::channel {

CVector steering_vector(const ArrayGeometry& geometry, double angle) {
    const Index n = geometry.n_elements;
    if (n < 1)
        throw std::invalid_argument("steering_vector: n_elements must be >= 1");
    CVector a(n);
    const double phase = M_PI * std::sin(angle);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Index m = 0; m < n; ++m)
        a(m) = std::polar(scale, phase * static_cast<double>(m));
    return a;
}

CMatrix generate_channel(const ArrayGeometry& tx, const ArrayGeometry& rx, int n_paths, Rng& rng) {
    if (n_paths < 1)
        throw std::invalid_argument("generate_channel: n_paths must be >= 1");
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    CMatrix h = CMatrix::Zero(rx.n_elements, tx.n_elements);
    for (int l = 0; l < n_paths; ++l) {
        const cplx gain = complex_normal(rng);
        const double theta = angle(rng);
        const double phi = angle(rng);
        h += gain * steering_vector(rx, theta) * steering_vector(tx, phi).adjoint();
    }
    h *= std::sqrt(static_cast<double>(tx.n_elements * rx.n_elements) / n_paths);
    return h;
}

Index ChannelSet::group_of(Index k) const {
    for (Index g = 0; g < n_groups(); ++g)
        for (Index m : groups[g])
            if (m == k)
                return g;
    throw std::out_of_range("receiver " + std::to_string(k) + " belongs to no group");
}

void ChannelSet::validate() const {
    if (channels.empty())
        throw std::invalid_argument("ChannelSet: no receivers");
    for (const auto& h : channels)
        if (h.rows() != n_rx() || h.cols() != n_tx())
            throw DimensionError("ChannelSet: channel matrices differ in shape");
    if (bits.size() != groups.size())
        throw DimensionError("ChannelSet: one payload per group required");
    std::vector<int> seen(channels.size(), 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty())
            throw std::invalid_argument("ChannelSet: empty group " + std::to_string(g));
        if (!(bits[g] > 0.0))
            throw std::invalid_argument("ChannelSet: payload must be positive");
        for (Index k : groups[g]) {
            if (k < 0 || k >= n_receivers())
                throw std::out_of_range("ChannelSet: receiver index out of range");
            if (seen[k]++)
                throw std::invalid_argument("ChannelSet: receiver " + std::to_string(k) +
                                            " appears in more than one group");
        }
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
        if (!seen[k])
            throw std::invalid_argument("ChannelSet: receiver " + std::to_string(k) +
                                        " is not in any group");
}

std::vector<Group> equal_groups(Index k_total, Index g_total) {
    if (g_total < 1 || k_total < g_total || k_total % g_total != 0)
        throw std::invalid_argument("equal_groups: k_total must be a positive multiple of g_total");
    const Index per = k_total / g_total;
    std::vector<Group> out(static_cast<std::size_t>(g_total));
    for (Index g = 0; g < g_total; ++g)
        for (Index i = 0; i < per; ++i)
            out[g].push_back(g * per + i);
    return out;
}

ChannelSet generate_channel_set(const ArrayGeometry& tx, const ArrayGeometry& rx, int n_paths,
                                std::vector<Group> groups, std::vector<double> bits, Rng& rng) {
    ChannelSet chs;
    Index k_total = 0;
    for (const auto& g : groups)
        k_total += static_cast<Index>(g.size());
    chs.channels.reserve(static_cast<std::size_t>(k_total));
    for (Index k = 0; k < k_total; ++k)
        chs.channels.push_back(generate_channel(tx, rx, n_paths, rng));
    chs.groups = std::move(groups);
    chs.bits = std::move(bits);
    chs.validate();
    return chs;
}

CVector mean_group_vector(const ChannelSet& chs, Index group) {
    if (group < 0 || group >= chs.n_groups())
        throw std::out_of_range("mean_group_vector: invalid group");
    const auto& members = chs.groups[group];
    if (members.empty())
        throw std::invalid_argument("mean_group_vector: empty group");
    CVector sum = CVector::Zero(chs.n_rx() * chs.n_tx());
    for (Index k : members)
        sum += chs.channels[k].reshaped();
    return sum / static_cast<double>(members.size());
}

RMatrix igc(const ChannelSet& chs) {
    const Index g = chs.n_groups();
    if (g < 2)
        throw std::invalid_argument("igc: at least two groups required");
    std::vector<CVector> h;
    for (Index j = 0; j < g; ++j) {
        CVector v = mean_group_vector(chs, j);
        const double n = v.norm();
        if (n == 0.0)
            throw std::invalid_argument("igc: group " + std::to_string(j) +
                                        " has a zero mean channel");
        h.push_back(v / n);
    }
    RMatrix rho = RMatrix::Zero(g, g);
    for (Index j = 0; j < g; ++j)
        for (Index l = j + 1; l < g; ++l) {
            const double r = std::min(1.0, std::abs(h[j].dot(h[l])));
            rho(j, l) = r;
            rho(l, j) = r;
        }
    return rho;
}

void write_channel_csv(std::ostream& os, const ChannelSet& chs) {
    char buf[160];
    for (Index g = 0; g < chs.n_groups(); ++g) {
        std::snprintf(buf, sizeof buf, "#group,%lld,%.17g,", static_cast<long long>(g), chs.bits[g]);
        os << buf;
        for (std::size_t i = 0; i < chs.groups[g].size(); ++i)
            os << (i ? " " : "") << chs.groups[g][i];
        os << '\n';
    }
    os << "receiver,row,col,re,im\n";
    for (Index k = 0; k < chs.n_receivers(); ++k) {
        const CMatrix& h = chs.channels[k];
        for (Index c = 0; c < h.cols(); ++c)
            for (Index r = 0; r < h.rows(); ++r) {
                std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%.17g,%.17g\n",
                              static_cast<long long>(k), static_cast<long long>(r),
                              static_cast<long long>(c), h(r, c).real(), h(r, c).imag());
                os << buf;
            }
    }
}

ChannelSet read_channel_csv(std::istream& is) {
    struct Entry {
        long long k, r, c;
        double re, im;
    };
    ChannelSet chs;
    std::vector<Entry> entries;
    std::string line;
    long long n_rec = 0, n_rows = 0, n_cols = 0;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line.rfind("receiver,", 0) == 0)
            continue;
        for (char& ch : line)
            if (ch == ',')
                ch = ' ';
        std::istringstream ss(line);
        if (line.rfind("#group", 0) == 0) {
            std::string tag;
            long long g;
            double bits;
            ss >> tag >> g >> bits;
            if (!ss || g != static_cast<long long>(chs.groups.size()))
                throw std::invalid_argument("channel csv line " + std::to_string(lineno) +
                                            ": malformed group record");
            Group members;
            Index m;
            while (ss >> m)
                members.push_back(m);
            chs.groups.push_back(std::move(members));
            chs.bits.push_back(bits);
            continue;
        }
        Entry e{};
        if (!(ss >> e.k >> e.r >> e.c >> e.re >> e.im) || e.k < 0 || e.r < 0 || e.c < 0)
            throw std::invalid_argument("channel csv line " + std::to_string(lineno) +
                                        ": expected receiver,row,col,re,im");
        n_rec = std::max(n_rec, e.k + 1);
        n_rows = std::max(n_rows, e.r + 1);
        n_cols = std::max(n_cols, e.c + 1);
        entries.push_back(e);
    }
    chs.channels.assign(static_cast<std::size_t>(n_rec), CMatrix::Zero(n_rows, n_cols));
    for (const auto& e : entries)
        chs.channels[e.k](e.r, e.c) = cplx(e.re, e.im);
    chs.validate();
    return chs;
}

} // namespace hybridcast::channel
