"""cphase-witness -- separability certificates and trichotomy checks for G_eta gates.

G_eta multiplies the all-ones basis state of its target set S by a phase
eta != 1 and fixes every other basis state (eta = -1 is C-SIGN / CZ). For any
pure state psi and |S| >= 2, at least one of these holds:

    (1) psi is S-entangled
    (2) G psi is S-entangled
    (3) G simplifies on psi (fixes it, or acts as the gate on S minus i)

This package checks that statement numerically with explicit certificates,
replays the proof's coefficient systems, and fuzzes it over seeded families.

All modules use loguru for structured debug logging (component-tagged via
logger.bind). Run with -v / --verbose for full DEBUG output.

Usage:
    # Analyze a state file against S = {1,2} and theta = pi
    uv run czw analyze plusplus.state --s 1,2 --theta pi

    # Same report as one JSON line
    uv run czw --json analyze ghz3.state --s 1,2 --theta pi/2

    # Fuzz the trichotomy over n in 2..4 (JSON-lines per trial + summary)
    uv run czw --json fuzz --n-max 4 --trials 10000 --seed 7

    # Sample and check 1000 solutions of the 4-sets lemma with eta = i
    uv run czw lemma --arity 4 --eta-theta pi/2 --count 1000

    # Write |+++> as a state file
    uv run czw gen --family plus --n 3

    # Specify config file
    uv run czw -c /path/to/custom.env fuzz --trials 100

State file format:
    n=2            # first non-comment line: qubit count
    00 0.5 0       # bitstring (leftmost = qubit 1), real part, imaginary part
    11 -0.5 0      # unlisted basis states are zero

Exit codes:
    0   ok
    2   internal contradiction (no branch held, audit failed, lemma violated)
    64  usage error (bad flags, |S| < 2, unsupported arity)
    65  data error (malformed state file, bad normalization, domain mismatch)
    66  file error (missing or unreadable input)

Core modules:
    config          -- WitnessConfig via pydantic-settings (CZW_* env vars, .env).
                       Tolerances tau_norm / tau_eta / tau_sep / tau_zero / lemma_tol,
                       max_qubits, seed, max_workers. setup_logging() installs the
                       stderr sink and the optional rotating file sink in log_dir.
    models          -- StrEnums (SimplificationKind, CaseKind, Quad, Region, Relabel,
                       LemmaArity, ConclusionBranch, FamilyKind), ExitCode, tolerances.
    errors          -- WitnessError hierarchy and categorize_error() -> ExitCode.
    strings         -- PartialString (0/1 maps on qubit subsets), restriction, union,
                       test strings, and the x^A/x^B/x^C/x^D family construction.
    state           -- PureState with dense complex amplitudes, make_state validation,
                       tensor products, amplitude lookup, swap, basis and |+> states.
    gate            -- PhaseGateSpec, make_gate, apply, adjoint.
    separability    -- Bipartition enumeration, matricization, rank-one detection by SVD
                       and by 2x2 minors, factorization certificates, everywhere
                       entanglement.
    simplification  -- fixed_point / reduces detection with statevector verification and
                       the support strings non-simplification guarantees.
    theorem         -- verify_trichotomy, case classification with relabeling,
                       coefficient extraction, case equations, witness construction and
                       the proof audit.
    lemmas          -- Checkers, solution families and seeded samplers for the 4-sets,
                       3-sets and 2-sets coefficient lemmas.
    harness         -- Philox-seeded state families and the trichotomy / lemma fuzz
                       drivers with concurrent, order-preserving aggregation.
    concurrency     -- psutil-based worker sizing, ThreadPoolExecutor trial runner, RSS.
    statefile       -- State file parsing and 17-digit serialization.
    cli             -- Click group `czw` (analyze, fuzz, lemma, gen) with exit-code mapping.
"""

__version__ = "0.3.0"
