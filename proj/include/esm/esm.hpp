#pragma once

#include "esm/basis.hpp"
#include "esm/config.hpp"
#include "esm/correlation.hpp"
#include "esm/csv.hpp"
#include "esm/errors.hpp"
#include "esm/fock.hpp"
#include "esm/harmonic.hpp"
#include "esm/kubo.hpp"
#include "esm/matrix.hpp"
#include "esm/parallel.hpp"
#include "esm/poly.hpp"
#include "esm/runner.hpp"
#include "esm/source.hpp"
#include "esm/spectrum.hpp"
#include "esm/thermal.hpp"
