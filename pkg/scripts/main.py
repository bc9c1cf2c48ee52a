"""
Main Script for Bell-Shape Analysis

This script demonstrates how to use the modules in the scripts package to
analyse functions given by their exponential representation: loading
representation documents, checking the level crossing condition, exact
sign-change certificates for the counterexamples, and the example suite.
"""

import os
import sys
from fractions import Fraction

# Add the parent directory to the path so we can import from scripts
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from scripts.data_loader import load_function, load_representations
from scripts.data_processing import format_frame, level_crossing_frame, verdict_summary
from scripts.exact_core import count_sign_changes_exact, diff_exppoly, diff_rational, eval_exact, sign_certified
from scripts.examples import certify_three_term_maximum, example_61_phi, run_all, scaled_levy_derivative
from scripts.numeric import QuadratureOptions, bell_test
from scripts.representation import check_level_crossing, check_tail_integrability

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "Data")


def main(include_slow: bool = False):
    """
    Main function demonstrating the complete analysis pipeline.
    """
    print("=" * 80)
    print("BELL-SHAPE ANALYSIS - DEMONSTRATION PIPELINE")
    print("=" * 80)

    try:
        # Step 1: Load representation documents
        print("\n1. LOADING REPRESENTATIONS")
        print("-" * 40)

        documents = load_representations(os.path.join(DATA_DIR, "representations"))
        for name, document in documents.items():
            closed = "closed form" if document.closed_form else "numeric transform"
            print(f"  - {name}: {document.kind}, b = {document.representation.b} ({closed})")

        # Step 2: Level crossing condition
        print("\n2. CHECKING THE LEVEL CROSSING CONDITION")
        print("-" * 40)

        for name, document in documents.items():
            phi = document.representation.phi
            report = check_level_crossing(phi)
            tail = check_tail_integrability(phi)
            verdict = "holds" if report.passed else f"fails at k = {report.violations}"
            print(f"  - {name}: level crossing {verdict}; tail integral finite: {tail.finite}")

        print("\nLevel counts for the first counterexample:")
        print(format_frame(level_crossing_frame(check_level_crossing(example_61_phi())), "text"))

        # Step 3: Exact certificates
        print("\n3. EXACT CERTIFICATES")
        print("-" * 40)

        density = load_function(os.path.join(DATA_DIR, "functions", "ex61_density.json"))
        second = diff_exppoly(density.function, 2)
        for x in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            value = eval_exact(second, x)
            print(f"  f''({x}) = {value}  sign {sign_certified(value):+d}")

        h = scaled_levy_derivative(example_61_phi())
        certificate = certify_three_term_maximum(h)
        print(f"  max of {h}: {certificate['maximum']} in {certificate['enclosure']}")

        rational = load_function(os.path.join(DATA_DIR, "functions", "ex65.json"))
        for n in (1, 2, 3):
            count = count_sign_changes_exact(diff_rational(rational.function, n))
            print(f"  sign changes of {rational.name}^({n}): {count}")

        # Step 4: Numeric evidence
        print("\n4. NUMERIC BELL TEST")
        print("-" * 40)

        opts = QuadratureOptions.from_env()
        gaussian = documents["gaussian"].transform
        report = bell_test(gaussian, 4, 0.1, opts=opts)
        print(f"  {gaussian.name}, t = 0.1: counts {[o.count for o in report.orders]} ({report.verdict})")

        # Step 5: Example suite
        print("\n5. EXAMPLE SUITE")
        print("-" * 40)

        suite = run_all(opts=opts, include_slow=include_slow, show_progress=True)
        for result in suite.results:
            if result.verdict != "skipped":
                print(f"  {result.line()}")
        print()
        print(verdict_summary(suite).to_string())

        print("\n" + "=" * 80)
        print("ANALYSIS PIPELINE COMPLETED" if suite.passed else "ANALYSIS PIPELINE FINISHED WITH FAILURES")
        print("=" * 80)

        return suite.passed

    except Exception as e:
        print(f"\n❌ Error during analysis: {e}")
        print("Please check the documents under Data/ and try again.")
        return False


if __name__ == "__main__":
    success = main(include_slow="--slow" in sys.argv)

    if success:
        print("\n🎉 All demonstrations completed successfully!")
        print("\nTo use these modules in your own analysis:")
        print("1. Import the modules: from scripts import exact_core, representation, numeric, etc.")
        print("2. Or use the command line: bellshape verify --case 6.5b")
        print("3. Check the docstrings for detailed parameter information")
    else:
        sys.exit(1)
