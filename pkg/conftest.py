# fixtures from the plugin; the installed entry point is disabled in
# pytest.ini so it is not registered twice
pytest_plugins = ["holofem.pytest_plugin"]
