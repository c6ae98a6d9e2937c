__appname__ = "l0forge"
__version__ = "0.1.0"
__license__ = "GPL-3.0"
__author__ = "l0forge developers"
