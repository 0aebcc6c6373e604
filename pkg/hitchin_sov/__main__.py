"""hitchin-sov <build|solve|angles|verify|sample> [options]"""

import sys

from django.core.management import ManagementUtility

from hitchin_sov import conf  # noqa: F401  configures settings when there is no project


def main(argv=None):
    utility = ManagementUtility(list(sys.argv if argv is None else argv))
    utility.prog_name = 'hitchin-sov'
    utility.execute()


if __name__ == '__main__':
    main()
