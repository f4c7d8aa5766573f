from ebayes.reg_eb import compat, marginal, models, selection
from ebayes.reg_eb.compat import compatibility_number, prediction_loss
from ebayes.reg_eb.marginal import log_marginal_support
from ebayes.reg_eb.models import RegressionData, RegressionEBFit, SupportMarginal
from ebayes.reg_eb.selection import enumerate_support_marginals, mmle_regression, regression_tau, support_posterior
