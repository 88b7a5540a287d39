#ifndef GED_IO_HPP
#define GED_IO_HPP

#include <string>
#include <vector>

#include "ged/graph.hpp"

namespace ged {

// Line-oriented JSON storage. One object per line.
//
// Graph line:  {"n": 5, "labels": [0,0,1,0,2], "edges": [[0,1],[1,2]]}
// Pair line:   {"q": 0, "d": 1, "costs": [1,1,1,1,1], "target": 4.0}
// "target" may be null or absent for unscored pairs.
//
// Loaders throw std::runtime_error naming the file and 1-based line on any
// malformed record. Loaded graphs are validated.

std::vector<Graph> load_graphs(const std::string& path);
void save_graphs(const std::string& path, const std::vector<Graph>& graphs);

std::vector<PairRecord> load_pairs(const std::string& path);
void save_pairs(const std::string& path, const std::vector<PairRecord>& pairs);

// Resolves records against a graph list; throws on out-of-range indices.
std::vector<GraphPair> assemble_pairs(const std::vector<Graph>& graphs,
                                      const std::vector<PairRecord>& records);

}  // namespace ged

#endif
