#pragma once

#include "darcywave/errors.hpp"
#include "darcywave/fourier.hpp"
#include "darcywave/spectral_field.hpp"
#include "darcywave/multipliers.hpp"
#include "darcywave/littlewood_paley.hpp"
#include "darcywave/chebyshev.hpp"
#include "darcywave/parallel.hpp"
#include "darcywave/bulk_field.hpp"
#include "darcywave/params.hpp"
#include "darcywave/conformal.hpp"
#include "darcywave/forcing.hpp"
#include "darcywave/elliptic_strip.hpp"
#include "darcywave/gmres.hpp"
#include "darcywave/waveop.hpp"
#include "darcywave/continuation.hpp"
#include "darcywave/reconstruct.hpp"
#include "darcywave/io.hpp"
#include "darcywave/cli.hpp"
