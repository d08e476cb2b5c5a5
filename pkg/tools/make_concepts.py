"""Regenerates src/punk/data/concepts.jsonl (69 probability concepts)."""

import json
import re
from pathlib import Path

# (name, chapter, section, definition, example)
CONCEPTS = [
    ("Probability", 1, 3, "A function P that assigns a real number P(A) to each event A, satisfying nonnegativity, P(sample space)=1, and countable additivity.", "P(heads) = 1/2 for a fair coin flip."),
    ("Complement Of An Event", 1, 2, "The set of outcomes not in A, written A^c, so P(A^c) = 1 - P(A).", "If A is rolling an even number, A^c is rolling an odd number."),
    ("Disjoint", 1, 2, "Events A and B are disjoint when they share no outcomes, A intersect B is empty.", "Rolling a 1 and rolling a 6 on one die roll are disjoint."),
    ("Event", 1, 2, "A subset of the sample space to which a probability can be assigned.", "Getting at least one head in two coin flips."),
    ("Intersection Of Events", 1, 2, "The event that both A and B occur, written A intersect B.", "Drawing a card that is both red and a king."),
    ("Monotone Increasing", 1, 3, "A sequence of events A_1 subset A_2 subset ... whose union is the limit event; P(A_n) converges to P(limit).", "A_n = at least one head in the first n flips."),
    ("Mutually Exclusive", 1, 2, "A collection of events of which at most one can occur; pairwise disjoint.", "The six faces of a die are mutually exclusive outcomes."),
    ("Partition", 1, 2, "A collection of disjoint events whose union is the whole sample space.", "The events X<0, X=0 and X>0 partition the real line."),
    ("Sample Outcome", 1, 2, "A single element omega of the sample space; one possible result of the experiment.", "The outcome HT of flipping a coin twice."),
    ("Sample Space", 1, 2, "The set Omega of all possible outcomes of an experiment.", "Omega = {HH, HT, TH, TT} for two coin flips."),
    ("Set Difference", 1, 2, "The outcomes in A that are not in B, written A minus B = A intersect B^c.", "Rolling an even number but not a 6: {2, 4}."),
    ("Union", 1, 2, "The event that A or B (or both) occur, written A union B.", "Drawing a king or a queen from a deck."),
    ("Uniform Probability Distribution", 1, 3, "Probability proportional to size: P(A) = |A| / |Omega| for a finite sample space with equally likely outcomes.", "Each face of a fair die has probability 1/6."),
    ("Independent Events", 1, 5, "Events A and B with P(A intersect B) = P(A) P(B); knowing one occurred does not change the other's probability.", "Two separate fair coin flips both landing heads has probability 1/4."),
    ("Conditional Probability", 1, 6, "The probability of A given that B occurred: P(A | B) = P(A intersect B) / P(B) when P(B) > 0.", "P(sum is 8 | first die shows 3) = 1/6."),
    ("Bayes' Theorem", 1, 7, "P(A | B) = P(B | A) P(A) / P(B), updating the probability of A after observing B.", "Computing the probability of disease given a positive test from sensitivity, specificity and prevalence."),
    ("Random Variable", 2, 1, "A mapping X from the sample space to the real numbers, assigning a number X(omega) to each outcome.", "X = number of heads in three coin flips."),
    ("Cumulative Distribution Function", 2, 2, "F(x) = P(X <= x), a nondecreasing right-continuous function from the reals to [0, 1].", "For a fair coin count of heads in one flip, F(0) = 1/2 and F(1) = 1."),
    ("Inverse Cumulative Distribution Function", 2, 2, "F^{-1}(q) = inf{x : F(x) > q}, the value at or below which X falls with probability q.", "The standard normal inverse CDF at 0.975 is about 1.96."),
    ("Probability Density Function", 2, 2, "A nonnegative function f with P(a < X < b) equal to the integral of f from a to b; the derivative of the CDF where it exists.", "f(x) = 1 on [0, 1] for the uniform distribution."),
    ("Probability Function", 2, 2, "The function giving the probability of each value of a discrete random variable; another name for the probability mass function.", "p(x) = 1/6 for each face x of a fair die."),
    ("Probability Mass Function", 2, 2, "For a discrete X, f(x) = P(X = x); nonnegative and summing to 1 over the support.", "Binomial(2, 1/2) has mass 1/4, 1/2, 1/4 at 0, 1, 2."),
    ("Quantile Function", 2, 2, "The function mapping a probability q in (0, 1) to the q-th quantile of X; the generalized inverse of the CDF.", "The median is the quantile function evaluated at 1/2."),
    ("The Bernoulli Distribution", 2, 3, "X takes the value 1 with probability p and 0 with probability 1 - p; the distribution of a single binary trial.", "An unfair coin with P(heads) = 0.3 is Bernoulli(0.3)."),
    ("The Binomial Distribution", 2, 3, "The number of successes in n independent Bernoulli(p) trials; P(X = k) = C(n, k) p^k (1-p)^{n-k}.", "Number of heads in 10 fair coin flips is Binomial(10, 1/2)."),
    ("The Discrete Uniform Distribution", 2, 3, "X takes each of k values with equal probability 1/k.", "A fair die roll is uniform on {1, ..., 6}."),
    ("The Geometric Distribution", 2, 3, "The number of trials until the first success in independent Bernoulli(p) trials; P(X = k) = p (1-p)^{k-1}.", "Number of rolls until the first 6 on a fair die."),
    ("The Point Mass Distribution", 2, 3, "All probability concentrated at a single point a: P(X = a) = 1.", "A rigged die that always shows 3."),
    ("The Poisson Distribution", 2, 3, "Counts of rare events with rate lambda: P(X = k) = e^{-lambda} lambda^k / k!.", "Number of typos per page with an average of 2 per page is Poisson(2)."),
    ("t Distribution", 2, 4, "A symmetric heavy-tailed distribution with density proportional to (1 + x^2/nu)^{-(nu+1)/2}, indexed by degrees of freedom nu.", "The standardized sample mean with estimated variance follows a t distribution."),
    ("Cauchy Distribution", 2, 4, "The t distribution with one degree of freedom; density 1 / (pi (1 + x^2)); its mean does not exist.", "The ratio of two independent standard normals is Cauchy."),
    ("Exponential Distribution", 2, 4, "Waiting-time distribution with density (1/beta) e^{-x/beta} for x > 0; memoryless.", "Time between arrivals of a Poisson process is exponential."),
    ("Gamma Distribution", 2, 4, "Density x^{alpha-1} e^{-x/beta} / (beta^alpha Gamma(alpha)) for x > 0; sums of exponentials are gamma.", "The waiting time until the third arrival in a Poisson process."),
    ("Gaussian", 2, 4, "The bell-shaped distribution with density (1 / (sigma sqrt(2 pi))) e^{-(x-mu)^2 / (2 sigma^2)}; synonymous with the normal distribution.", "Measurement noise is often modeled as Gaussian."),
    ("Normal", 2, 4, "The distribution with mean mu and variance sigma^2 whose density is the bell curve; the standard normal has mu = 0, sigma = 1.", "Heights in a population are approximately normal."),
    ("The Chi-Squared Distribution", 2, 4, "The distribution of a sum of squares of k independent standard normals; a gamma with alpha = k/2, beta = 2.", "The sample variance of normal data scales to a chi-squared."),
    ("The Beta Distribution", 2, 4, "Density proportional to x^{alpha-1} (1-x)^{beta-1} on (0, 1).", "The posterior of a coin's bias under a uniform prior after observed flips is beta."),
    ("The Uniform Distribution", 2, 4, "Constant density 1 / (b - a) on the interval (a, b).", "A random point on [0, 1] chosen uniformly."),
    ("Bivariate Probability Density Function", 2, 5, "A nonnegative function f(x, y) integrating to 1 whose double integrals give joint probabilities for (X, Y).", "f(x, y) = 1 on the unit square for two independent uniforms."),
    ("Joint Mass Function", 2, 5, "For discrete (X, Y), f(x, y) = P(X = x and Y = y).", "The joint mass of two fair dice is 1/36 at each pair."),
    ("Marginal Density Function", 2, 6, "The density of X alone, obtained by integrating the joint density over y.", "Integrating a bivariate normal over y leaves a normal in x."),
    ("Marginal Mass Function", 2, 6, "The mass function of X alone, obtained by summing the joint mass over y.", "Summing the two-dice joint mass over the second die gives 1/6 per face."),
    ("Independent Random Variables", 2, 7, "X and Y whose joint distribution factorizes: f(x, y) = f_X(x) f_Y(y) for all x, y.", "Two separate die rolls are independent random variables."),
    ("Conditional Probability Density Function", 2, 8, "f(x | y) = f(x, y) / f_Y(y), the density of X given Y = y.", "Given Y = y in a bivariate normal, X is normal with shifted mean."),
    ("Conditional Probability Mass Function", 2, 8, "f(x | y) = P(X = x | Y = y) = f(x, y) / f_Y(y) for discrete variables.", "Given the sum of two dice is 7, each first-die value has conditional mass 1/6."),
    ("Independent And Identically Distributed", 2, 9, "A sample X_1, ..., X_n of mutually independent variables sharing one distribution, written IID.", "n fair coin flips are IID Bernoulli(1/2)."),
    ("Multinomial", 2, 9, "The counts over k categories from n independent draws with probabilities p_1, ..., p_k; generalizes the binomial.", "Counts of each face over 60 die rolls are multinomial."),
    ("Multivariate Normal", 2, 9, "A random vector with density determined by a mean vector mu and covariance matrix Sigma; every linear combination is normal.", "(X, Y) with correlated Gaussian components is bivariate normal."),
    ("Expected Value", 3, 1, "The mean of X: the integral (or sum) of x weighted by its density (or mass), E(X) = integral of x f(x) dx.", "E(X) = 3.5 for a fair die roll."),
    ("First Moment", 3, 1, "E(X), the first raw moment of a distribution; identical to the expected value.", "The first moment of Bernoulli(p) is p."),
    ("Mean", 3, 1, "The expectation E(X) of a random variable, or the arithmetic average of a sample.", "The mean of a uniform on (0, 1) is 1/2."),
    ("Covariance And Correlation", 3, 3, "Cov(X, Y) = E((X - mu_X)(Y - mu_Y)) measures linear co-movement; correlation rescales it to [-1, 1].", "Height and weight have positive correlation."),
    ("Variance", 3, 3, "V(X) = E((X - mu)^2) = E(X^2) - mu^2, the expected squared deviation from the mean.", "The variance of a fair die roll is 35/12."),
    ("Conditional Expectation", 3, 5, "E(X | Y = y), the mean of X under the conditional distribution given Y = y; a function of y.", "E(X | X + Y = 7) for two dice is 3.5."),
    ("Conditional Variance", 3, 5, "V(X | Y = y), the variance of X under the conditional distribution given Y = y.", "In a bivariate normal, V(X | Y = y) = sigma_X^2 (1 - rho^2)."),
    ("Moment Generating Function", 3, 6, "M(t) = E(e^{tX}); its derivatives at 0 give the moments, and it determines the distribution when finite near 0.", "The MGF of a standard normal is e^{t^2 / 2}."),
    ("Chebyshev's Inequality", 4, 1, "P(|X - mu| >= t) <= sigma^2 / t^2: deviation probabilities are bounded by the variance.", "A variable stays within 2 standard deviations of its mean with probability at least 3/4."),
    ("Hoeffding's Inequality", 4, 2, "An exponential tail bound for sums of bounded independent variables: P(|mean - mu| > t) <= 2 e^{-2 n t^2} for variables in [0, 1].", "Bounding how far the empirical frequency of heads can be from 1/2."),
    ("Markov's Inequality", 4, 1, "For nonnegative X, P(X > t) <= E(X) / t.", "A nonnegative variable with mean 1 exceeds 10 with probability at most 1/10."),
    ("Mill's Inequality", 4, 2, "A Gaussian tail bound: for Z standard normal, P(|Z| > t) <= sqrt(2/pi) e^{-t^2/2} / t.", "Bounding the two-sided tail of a standard normal beyond t = 3."),
    ("Cauchy-Schwartz Inequality", 4, 3, "E|XY| <= sqrt(E(X^2) E(Y^2)); implies correlations lie in [-1, 1].", "Bounding covariance by the product of standard deviations."),
    ("Jensen's Inequality", 4, 3, "For convex g, E(g(X)) >= g(E(X)); reversed for concave g.", "E(X^2) >= (E X)^2, so variance is nonnegative."),
    ("Converges To X In Distribution", 5, 1, "The CDFs of X_n converge to the CDF of X at every continuity point.", "Standardized binomial counts converge in distribution to a normal."),
    ("Converges To X In Probability", 5, 1, "P(|X_n - X| > epsilon) tends to 0 for every epsilon > 0.", "The sample mean of IID variables converges in probability to the true mean."),
    ("Converges To X In Quadratic Mean", 5, 1, "E((X_n - X)^2) tends to 0; implies convergence in probability.", "The sample mean converges in quadratic mean when the variance is finite."),
    ("The Weak Law Of Large Numbers", 5, 2, "The sample mean of IID variables with finite mean converges in probability to the true mean.", "The running average of die rolls approaches 3.5."),
    ("The Central Limit Theorem", 5, 3, "The standardized sum of IID variables with finite variance converges in distribution to a standard normal.", "Averages of 100 uniform draws look approximately normal."),
    ("The Delta Method", 5, 4, "If sqrt(n)(X_n - mu) is asymptotically normal and g is differentiable, then g(X_n) is asymptotically normal with variance scaled by g'(mu)^2.", "The asymptotic distribution of the log of a sample mean."),
    ("The Multivariate Delta Method", 5, 4, "The delta method for vector statistics: the gradient of g transforms the asymptotic covariance matrix.", "The asymptotic variance of a ratio of two sample means."),
]


def slug(name: str) -> str:
    s = name.lower()
    if s.startswith("the "):
        s = s[4:]
    s = re.sub(r"[^a-z0-9]+", "-", s).strip("-")
    return s


def main():
    out = Path(__file__).parents[1] / "src" / "punk" / "data" / "concepts.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        for i, (name, chapter, section, definition, example) in enumerate(CONCEPTS, start=1):
            fh.write(
                json.dumps(
                    {
                        "id": slug(name),
                        "name": name,
                        "chapter": chapter,
                        "section": section,
                        "order": i,
                        "definitions": [definition],
                        "examples": [example],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    print(f"wrote {len(CONCEPTS)} concepts to {out}")


if __name__ == "__main__":
    main()
