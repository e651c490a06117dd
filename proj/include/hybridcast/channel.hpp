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

#pragma once

#include <iosfwd>
#include <vector>

#include "hybridcast/types.hpp"

namespace hybridcast::channel {

/// Half-wavelength uniform linear array.
struct ArrayGeometry {
    Index n_elements = 1;
};

/// Unit-norm ULA response, entry m = exp(j pi m sin(angle)) / sqrt(n).
CVector steering_vector(const ArrayGeometry& geometry, double angle);

/// Geometric narrowband channel of shape rx.n_elements x tx.n_elements.
/// Path gains are CN(0,1), departure and arrival angles uniform on [0, 2pi).
CMatrix generate_channel(const ArrayGeometry& tx, const ArrayGeometry& rx, int n_paths, Rng& rng);

using Group = std::vector<Index>;

struct ChannelSet {
    std::vector<CMatrix> channels; ///< H_k, one per receiver
    std::vector<Group> groups;     ///< receiver indices per multicast group
    std::vector<double> bits;      ///< payload per group

    Index n_receivers() const { return static_cast<Index>(channels.size()); }
    Index n_groups() const { return static_cast<Index>(groups.size()); }
    Index n_tx() const { return channels.empty() ? 0 : channels.front().cols(); }
    Index n_rx() const { return channels.empty() ? 0 : channels.front().rows(); }

    /// Group index of receiver k; throws if k is not a member of any group.
    Index group_of(Index k) const;

    /// Throws on overlapping or incomplete groups, ragged channel shapes or
    /// non-positive payloads.
    void validate() const;
};

/// Splits receivers 0..k_total-1 into g_total consecutive groups of equal size.
std::vector<Group> equal_groups(Index k_total, Index g_total);

/// Draws one channel per receiver for the given topology.
ChannelSet generate_channel_set(const ArrayGeometry& tx, const ArrayGeometry& rx, int n_paths,
                                std::vector<Group> groups, std::vector<double> bits, Rng& rng);

/// Mean of the column-major vectorized member channels of a group.
CVector mean_group_vector(const ChannelSet& chs, Index group);

/// Inter-group correlation |h_j^H h_l| / (|h_j| |h_l|), zero on the diagonal.
RMatrix igc(const ChannelSet& chs);

/// CSV dump: "#group,<g>,<bits>,<space-separated members>" lines followed by
/// "receiver,row,col,re,im" rows.
void write_channel_csv(std::ostream& os, const ChannelSet& chs);
ChannelSet read_channel_csv(std::istream& is);

} // namespace hybridcast::channel
