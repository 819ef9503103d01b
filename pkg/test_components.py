#!/usr/bin/env python3
"""
Smoke test for the cumulant toolkit components.
Runs each layer once on the builtin distributions and prints a summary.
"""

import logging
import sys
import time


def test_combinatorics():
    """Partitions, Mobius values and shuffles"""
    print("🧪 Testing combinatorics...")

    try:
        from models.partitions import bell_numbers, enumerate_partitions, enumerate_shuffles, mobius_to_top

        parts = enumerate_partitions(5)
        print(f"✅ Partitions of 5: {len(parts)} (Bell number {bell_numbers(5)[5]})")
        print(f"✅ Mobius sum over the lattice of 5: {sum(mobius_to_top(pi) for pi in parts)}")
        print(f"✅ Shuffles of decks (2, 2): {len(enumerate_shuffles((2, 2)))}")

        print("🎉 Combinatorics tests passed!")
        return True

    except Exception as e:
        print(f"❌ Combinatorics test failed: {str(e)}")
        return False


def test_moment_conversion():
    """Exact moments-to-cumulants conversion"""
    print("\n🧪 Testing moment conversion...")

    try:
        from models.dists import builtin
        from models.momentcalc import cumulants_to_moments, moments_to_cumulants

        moments = builtin("exponential1").reference_moments(6)
        kappas = moments_to_cumulants(moments)
        print(f"✅ exponential1 cumulants: {[str(k) for k in kappas.values]}")
        assert cumulants_to_moments(kappas) == moments
        print("✅ Round trip through cumulants is exact")

        print("🎉 Moment conversion tests passed!")
        return True

    except Exception as e:
        print(f"❌ Moment conversion test failed: {str(e)}")
        return False


def test_integral_routes():
    """Truncated, simplex and mean residual life routes on every builtin"""
    print("\n🧪 Testing integral routes...")

    try:
        from models.volterra import cumulants_via_mrl, cumulants_via_theorem1, cumulants_via_truncated
        from services.verification import verification_builtins

        for d in verification_builtins():
            truncated = cumulants_via_truncated(d, 4)
            simplex = cumulants_via_theorem1(d, 4)
            mrl = cumulants_via_mrl(d, 3)
            print(f"✅ {d.name:24} kappa_2 {truncated[1]: .6f} / {simplex[1]: .6f}   kappa_3 mrl {mrl: .6f}")

        print("🎉 Integral route tests passed!")
        return True

    except Exception as e:
        print(f"❌ Integral route test failed: {str(e)}")
        return False


def test_joint_cumulants():
    """Hoeffding covariance on a comonotone pair"""
    print("\n🧪 Testing joint cumulants...")

    try:
        from models.dists import builtin
        from models.hoeffding import comonotone, hoeffding_covariance

        value = hoeffding_covariance(comonotone(builtin("uniform01"), 2))
        print(f"✅ Comonotone uniform01 covariance: {value:.8f} (exact 1/12 = {1 / 12:.8f})")

        print("🎉 Joint cumulant tests passed!")
        return True

    except Exception as e:
        print(f"❌ Joint cumulant test failed: {str(e)}")
        return False


def test_cli():
    """Command line round trip"""
    print("\n🧪 Testing command line...")

    try:
        from scripts.cumulants import main as cli_main

        code = cli_main(["compare", "--dist", "uniform01", "--max-order", "3", "--methods", "truncated,theorem1"])
        print(f"\n✅ compare exited with {code}")

        print("🎉 Command line tests passed!")
        return code == 0

    except Exception as e:
        print(f"❌ Command line test failed: {str(e)}")
        return False


def run_performance_test():
    """Time the default grid on the heavier routes"""
    print("\n🚀 Running Performance Tests...")

    try:
        from models.dists import builtin
        from models.volterra import cumulants_via_factorized, cumulants_via_theorem1

        d = builtin("stdnormal")
        for route in (cumulants_via_theorem1, cumulants_via_factorized):
            start_time = time.time()
            route(d, 6)
            print(f"✅ {route.__name__} to order 6: {time.time() - start_time:.3f} seconds")

        print("🎉 Performance tests completed!")
        return True

    except Exception as e:
        print(f"❌ Performance test failed: {str(e)}")
        return False


def main():
    """Run all checks"""
    logging.basicConfig(level=logging.WARNING)
    print("🚀 Cumulant Kit - Component Testing")
    print("=" * 60)

    test_results = []

    test_results.append(("Combinatorics", test_combinatorics()))
    test_results.append(("Moment conversion", test_moment_conversion()))
    test_results.append(("Integral routes", test_integral_routes()))
    test_results.append(("Joint cumulants", test_joint_cumulants()))
    test_results.append(("Command line", test_cli()))
    test_results.append(("Performance", run_performance_test()))

    print("\n" + "=" * 60)
    print("📊 TEST SUMMARY")
    print("=" * 60)

    passed = 0
    total = len(test_results)

    for test_name, result in test_results:
        status = "✅ PASS" if result else "❌ FAIL"
        print(f"{test_name:25} {status}")
        if result:
            passed += 1

    print(f"\nOverall: {passed}/{total} tests passed")

    if passed == total:
        print("🎉 All components work.")
        return True
    else:
        print("⚠️  Some tests failed. Please check the errors above.")
        return False


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
