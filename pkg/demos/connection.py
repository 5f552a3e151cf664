"""Rothstein bracket of a curved metric connection on the plane and on R^3."""
from hcd.corpus import curved_connection_m2, non_metric_connection_m2
from hcd.rothstein import RothsteinAlgebra, check_bianchi, check_rothstein, curvature, metric_report, metricize
from hcd.structfile import to_connection


def main():
    conn = to_connection(curved_connection_m2())
    print("r(d1, d2) =", curvature(conn, 0, 1))
    ra = RothsteinAlgebra(conn)
    D1, D2 = ra.D(0), ra.D(1)
    print("{D1, D2} =", ra.bracket(D1, D2))
    print(check_rothstein(ra, samples=40))
    print(check_bianchi(ra, samples=10))

    bad = to_connection(non_metric_connection_m2())
    print(metric_report(bad))
    fixed = metricize(bad)
    print("after averaging:", "PASS" if metric_report(fixed).passed else "FAIL")


if __name__ == "__main__":
    main()
