#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "poincare/geometry.hpp"

namespace poincare {

/// Mesh JSON schema:
///   { "nodes": [[x,y],...], "triangles": [[a,b,c],...],
///     "tags": ["inclusion"|"matrix",...],
///     "periodic_pairs": [[slave, master, wx, wy],...],
///     "dirichlet_nodes": [...], "h": .., "side": .., "cells_per_side": .. }
/// Field dumps add "field": [[re, im], ...] (one entry per node).
nlohmann::json mesh_to_json(const TriMesh& mesh);
TriMesh mesh_from_json(const nlohmann::json& j);

void write_mesh(const std::string& path, const TriMesh& mesh);
/// Mesh JSON with an extra "field": [[re, im], ...] per node.
nlohmann::json field_to_json(const TriMesh& mesh, const VectorC& field);
void write_field(const std::string& path, const TriMesh& mesh, const VectorC& field);
TriMesh read_mesh(const std::string& path);

}  // namespace poincare
