"""Built-in example structures, available as Python objects and as structure files."""
from __future__ import annotations

from .courant_dorfman import CDStructure, build_higher_dorfman
from .graded_algebra import GeneratorTable
from .structfile import from_cd


def standard_n2() -> CDStructure:
    """T + T* over a line: x of degree 0, theta = dx and the vector field psi."""
    T = GeneratorTable([("x", 0), ("theta", 1), ("psi", 1)])
    return CDStructure(2, T, {"x": T.gen("theta")}, {("theta", "psi"): 1}, {}, name="standard-n2")


def quadratic_lie_n2() -> CDStructure:
    """so(3) with the invariant form delta_ab, as a Courant algebroid over a point."""
    T = GeneratorTable([("e1", 1), ("e2", 1), ("e3", 1)])
    e1, e2, e3 = T.gens()
    pairing = {("e1", "e1"): 1, ("e2", "e2"): 1, ("e3", "e3"): 1}
    bracket = {("e1", "e2"): e3, ("e2", "e3"): e1, ("e3", "e1"): e2}
    return CDStructure(2, T, {}, pairing, bracket, name="quadratic-lie-n2")


def higher_dorfman_n3() -> CDStructure:
    """Vector fields of degree 2 and 1-forms over Q[x1, x2], untwisted."""
    return build_higher_dorfman(2, 3, name="higher-dorfman-n3")


def twisted_nonclosed_n2() -> CDStructure:
    """Dorfman bracket on R^4 twisted by omega = x4 dx1 dx2 dx3, which is not closed."""
    return build_higher_dorfman(4, 2, "x4*dx1*dx2*dx3", name="twisted-nonclosed-n2")


def heisenberg() -> CDStructure:
    """One odd generator e with <e,e> = 1 and zero bracket (the abelian example)."""
    return CDStructure(2, GeneratorTable([("e", 1)]), {}, {("e", "e"): 1}, {}, name="heisenberg-current")


def flat_connection_m2() -> dict:
    return {
        "name": "flat-connection-m2",
        "n": 2,
        "base": ["x1", "x2"],
        "generators": [{"name": "theta", "degree": 1}, {"name": "psi", "degree": 1}],
        "pairing": {"theta,psi": "1"},
        "connection": {},
    }


def curved_connection_m2() -> dict:
    """nabla_1 theta = x2^2 theta, nabla_1 psi = -x2^2 psi: metric, curvature 2 x2 theta psi."""
    data = flat_connection_m2()
    data["name"] = "curved-connection-m2"
    data["connection"] = {"x1,theta": {"theta": "x2^2"}, "x1,psi": {"psi": "-x2^2"}}
    return data


CD_EXAMPLES = {
    "standard-n2": standard_n2,
    "quadratic-lie-n2": quadratic_lie_n2,
    "higher-dorfman-n3": higher_dorfman_n3,
    "twisted-nonclosed-n2": twisted_nonclosed_n2,
    "heisenberg-current": heisenberg,
}

PASSING = ["standard-n2", "quadratic-lie-n2", "higher-dorfman-n3", "heisenberg-current"]


# inputs engineered to fail one checker each


def bad_pairing_n2() -> CDStructure:
    """<theta,theta> = <psi,psi> = 1 with dx = theta and [psi, x] = 1: breaks sesquilinearity at (x, psi)."""
    T = GeneratorTable([("x", 0), ("theta", 1), ("psi", 1)])
    return CDStructure(
        2, T, {"x": T.gen("theta")}, {("theta", "theta"): 1, ("psi", "psi"): 1}, {("psi", "x"): 1}, name="bad-pairing-n2"
    )


def corrupted_d_pva():
    """The standard Lambda-bracket with d(x^2) forced to 0 while d(x) = theta, so d is no derivation."""
    from .lambda_bracket import LambdaAlgebra, pva_from_cd

    W = pva_from_cd(standard_n2())
    T = W.table
    x = T.gen("x")
    return LambdaAlgebra(T, 2, {"x": T.gen("theta")}, W.given, d_overrides={x * x: T.zero()}, name="corrupted-d")


def higher_lambda_n3():
    """{b_L b} = L^2 in degree 3; Lambda is odd, so this coefficient cannot exist."""
    from .lambda_bracket import LambdaAlgebra

    T = GeneratorTable([("x", 0), ("a", 1), ("b", 2)])
    return LambdaAlgebra(T, 3, {}, {("b", "b"): [0, 0, 1]}, name="higher-lambda-n3")


def non_lie_lca():
    """{e_L e} = e + L on one odd generator: the bracket [e,e] = e violates Jacobi."""
    from .lambda_bracket import LambdaAlgebra

    T = GeneratorTable([("e", 1)])
    return LambdaAlgebra(T, 2, {}, {("e", "e"): [T.gen("e"), 1]}, name="non-lie")


def non_metric_connection_m2() -> dict:
    data = flat_connection_m2()
    data["name"] = "non-metric-connection-m2"
    data["connection"] = {"x1,theta": {"theta": "x1"}}
    return data


def bad_theta_n2() -> dict:
    """Darboux chart of T[2]T*[1] with Theta = -p theta + x p psi, which fails the master equation."""
    return {
        "name": "bad-theta-n2",
        "n": 2,
        "base": ["x"],
        "generators": [{"name": "theta", "degree": 1}, {"name": "psi", "degree": 1}, {"name": "p", "degree": 2}],
        "pairing": {"x,p": "1", "theta,psi": "1"},
        "theta": "-p*theta + x*p*psi",
    }


def example_data(name: str) -> dict:
    if name in CD_EXAMPLES:
        cd = CD_EXAMPLES[name]()
        extra = {"dgca": "laurent:1,6"} if name == "heisenberg-current" else {}
        return from_cd(cd, **extra)
    if name == "flat-connection-m2":
        return flat_connection_m2()
    if name == "curved-connection-m2":
        return curved_connection_m2()
    if name == "non-metric-connection-m2":
        return non_metric_connection_m2()
    if name == "bad-pairing-n2":
        return from_cd(bad_pairing_n2())
    if name == "bad-theta-n2":
        return bad_theta_n2()
    raise KeyError(f"unknown example {name!r}; choose from {', '.join(example_names())}")


def example_names() -> list[str]:
    return list(CD_EXAMPLES) + [
        "flat-connection-m2",
        "curved-connection-m2",
        "non-metric-connection-m2",
        "bad-pairing-n2",
        "bad-theta-n2",
    ]
